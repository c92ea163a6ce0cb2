#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <iostream>
#include <ostream>

#include "ozawa/folner_kernel.hpp"
#include "ozawa/parallel.hpp"
#include "ozawa/tree_kernel.hpp"

namespace ozawa::cli {

namespace {

std::string format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::text: return "text";
    case OutputFormat::json: return "json";
    case OutputFormat::csv: return "csv";
  }
  return "text";
}

OutputFormat parse_format(std::string_view s) {
  if (s == "text") return OutputFormat::text;
  if (s == "json") return OutputFormat::json;
  if (s == "csv") return OutputFormat::csv;
  throw UsageError("unknown output format '" + std::string(s) + "' (expected text, json or csv)");
}

std::size_t parse_count(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw UsageError("expected a non-negative integer for " + std::string(what) + ", got '" + std::string(s) + "'");
  return v;
}

// "a..b" or "a".
std::pair<std::size_t, std::size_t> parse_range(std::string_view s) {
  if (auto dots = s.find(".."); dots != std::string_view::npos) {
    auto lo = parse_count(s.substr(0, dots), "--n");
    auto hi = parse_count(s.substr(dots + 2), "--n");
    if (lo > hi) throw UsageError("empty range '" + std::string(s) + "'");
    return {lo, hi};
  }
  auto n = parse_count(s, "--n");
  return {n, n};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string canonical_kernel_tag(std::string_view tag) {
  if (tag == "tree") return "tree";
  if (tag.starts_with("folner:")) return "folner:" + to_string(parse_strategy(tag.substr(7)));
  throw UsageError("unknown kernel '" + std::string(tag) + "' (expected tree or folner:box|ball|whole)");
}

std::string canonical_E(const GroupModel& group, std::string_view spec) {
  if (spec.starts_with("ball:")) return "ball:" + std::to_string(parse_count(spec.substr(5), "--E ball:r"));
  if (spec.starts_with("list:")) {
    std::string out = "list:";
    bool first = true;
    for (const auto& e : resolve_E(group, spec)) {
      if (!first) out += ',';
      out += group.format(e);
      first = false;
    }
    return out;
  }
  throw UsageError("--E must be ball:r or list:e1,e2,..., got '" + std::string(spec) + "'");
}

}  // namespace

std::vector<std::string> RunConfig::to_args() const {
  std::vector<std::string> a{command, group};
  if (command == "ball") {
    a.push_back(std::to_string(n_hi));
    if (list_elements) a.push_back("--elements");
  } else if (command == "kernel" || command == "defect") {
    a.push_back(kernel);
    a.insert(a.end(), elements.begin(), elements.end());
    a.push_back("--n");
    a.push_back(command == "defect" ? std::to_string(n_lo) + ".." + std::to_string(n_hi) : std::to_string(n_hi));
  } else if (command == "verify") {
    a.push_back(kernel);
    for (const std::string& s :
         {std::string("--E"), E, std::string("--eps"), to_string(eps), std::string("--nmax"), std::to_string(n_max),
          std::string("--sample-radius"), std::to_string(sample.radius), std::string("--random"),
          std::to_string(sample.random_count), std::string("--seed"), std::to_string(sample.seed),
          std::string("--random-length"), std::to_string(sample.random_word_length)})
      a.push_back(s);
    if (!out.empty()) {
      a.push_back("--out");
      a.push_back(out);
    }
  }
  a.push_back("--format");
  a.push_back(format_name(format));
  a.push_back("--budget");
  a.push_back(std::to_string(budget));
  return a;
}

std::unique_ptr<OzawaKernel> make_kernel(std::shared_ptr<const GroupModel> group, std::string_view tag) {
  const std::string canon = canonical_kernel_tag(tag);
  if (canon == "tree") return std::make_unique<TreeKernel>(std::move(group));
  auto provider = std::make_shared<const FolnerSequenceProvider>(std::move(group), parse_strategy(canon.substr(7)));
  return std::make_unique<FolnerKernel>(std::move(provider));
}

std::vector<Element> resolve_E(const GroupModel& group, std::string_view spec) {
  if (spec.starts_with("ball:")) return punctured_ball(group, parse_count(spec.substr(5), "--E ball:r"));
  if (spec.starts_with("list:")) {
    std::vector<Element> out;
    ElementSet seen;
    const std::string_view body = spec.substr(5);
    if (body.empty()) return out;
    for (const auto& s : split_top_level(body)) {
      Element e = group.parse(s);
      if (seen.insert(e).second) out.push_back(std::move(e));
    }
    return out;
  }
  throw UsageError("--E must be ball:r or list:e1,e2,..., got '" + std::string(spec) + "'");
}

RunConfig parse_args(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Ozawa kernels on free and amenable groups: evaluation and exact verification", "ozawa"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags; flags win on conflict");
  app.require_subcommand(1);
  app.fallthrough();  // lets --config appear after the subcommand

  std::string group, kernel, x, y, g, n_text, eps_text = "1/10", format_text = "text", E = "ball:1", out_path;
  std::size_t n_ball = 0, n_max = 64, budget = kDefaultElementBudget;
  SampleSpec sample;
  bool list_elements = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format_text, "text, json or csv");
    sub->add_option("--budget", budget, "element budget for balls and Følner sets");
  };

  auto* ball = app.add_subcommand("ball", "growth table |ball(k)| for k <= n");
  ball->add_option("group", group, "group descriptor")->required();
  ball->add_option("n", n_ball, "largest radius")->required();
  ball->add_flag("--elements", list_elements, "also list the elements of each sphere");
  add_common(ball);

  auto* kern = app.add_subcommand("kernel", "exact kernel value u_n(x, y)");
  kern->add_option("group", group)->required();
  kern->add_option("kernel", kernel, "tree or folner:box|ball|whole")->required();
  kern->add_option("x", x)->required();
  kern->add_option("y", y)->required();
  kern->add_option("--n", n_text, "level n")->required();
  add_common(kern);

  auto* defect = app.add_subcommand("defect", "Følner defect |gG_n △ G_n|/|G_n| over a range of n");
  defect->add_option("group", group)->required();
  defect->add_option("provider", kernel, "box, ball or whole")->required();
  defect->add_option("g", g)->required();
  defect->add_option("--n", n_text, "level or range a..b")->required();
  add_common(defect);

  auto* verify = app.add_subcommand("verify", "certify the three Ozawa-kernel conditions");
  verify->add_option("group", group)->required();
  verify->add_option("kernel", kernel, "tree or folner:box|ball|whole")->required();
  verify->add_option("--E", E, "ball:r (punctured) or list:e1,e2,...");
  verify->add_option("--eps", eps_text, "epsilon as p/q");
  verify->add_option("--nmax", n_max, "largest level searched by the Følner kernel");
  verify->add_option("--sample-radius", sample.radius, "Gram sample contains ball(r)");
  verify->add_option("--random", sample.random_count, "extra random sample points");
  verify->add_option("--seed", sample.seed, "seed for random sample points");
  verify->add_option("--random-length", sample.random_word_length, "maximum length of random sample words");
  verify->add_option("--out", out_path, "certificate path (stdout if omitted)");
  add_common(verify);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return {};
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return {};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  cfg.format = parse_format(format_text);
  cfg.budget = budget;
  std::shared_ptr<const GroupModel> model;
  try {
    model = make_group(group, budget);
    cfg.group = model->descriptor();
    auto canon_element = [&](const std::string& s) { return model->format(model->parse(s)); };
    if (cfg.command == "ball") {
      cfg.n_hi = n_ball;
      cfg.list_elements = list_elements;
    } else if (cfg.command == "kernel") {
      cfg.kernel = canonical_kernel_tag(kernel);
      cfg.elements = {canon_element(x), canon_element(y)};
      auto [lo, hi] = parse_range(n_text);
      if (lo != hi) throw UsageError("kernel takes a single level --n");
      cfg.n_lo = cfg.n_hi = hi;
    } else if (cfg.command == "defect") {
      cfg.kernel = to_string(parse_strategy(kernel));
      cfg.elements = {canon_element(g)};
      std::tie(cfg.n_lo, cfg.n_hi) = parse_range(n_text);
    } else {
      cfg.kernel = canonical_kernel_tag(kernel);
      cfg.E = canonical_E(*model, E);
      try {
        cfg.eps = parse_rational(eps_text);
      } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--eps: ") + e.what());
      }
      if (cfg.eps <= 0) throw UsageError("--eps must be positive");
      cfg.n_max = n_max;
      cfg.sample = sample;
      cfg.out = out_path;
      if (cfg.format == OutputFormat::csv) throw UsageError("verify emits JSON certificates; --format csv is not supported");
    }
  } catch (const GroupError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

namespace {

int cmd_ball(const RunConfig& cfg, const GroupModel& group, std::ostream& out) {
  std::vector<std::size_t> sizes;
  for (std::size_t k = 0; k <= cfg.n_hi; ++k) sizes.push_back(group.ball_size(k));
  const auto elements = cfg.list_elements ? group.ball(cfg.n_hi) : std::vector<Element>{};
  auto sphere = [&](std::size_t k) {
    const std::size_t begin = k == 0 ? 0 : sizes[k - 1];
    return std::span<const Element>(elements).subspan(begin, sizes[k] - begin);
  };

  if (cfg.format == OutputFormat::json) {
    nlohmann::ordered_json j;
    j["group"] = cfg.group;
    j["sizes"] = sizes;
    if (cfg.list_elements) {
      nlohmann::ordered_json spheres = nlohmann::ordered_json::array();
      for (std::size_t k = 0; k <= cfg.n_hi; ++k) {
        nlohmann::ordered_json s = nlohmann::ordered_json::array();
        for (const auto& e : sphere(k)) s.push_back(group.format(e));
        spheres.push_back(s);
      }
      j["spheres"] = spheres;
    }
    out << j.dump(2) << "\n";
  } else if (cfg.format == OutputFormat::csv) {
    out << (cfg.list_elements ? "radius,size,element\n" : "radius,size\n");
    for (std::size_t k = 0; k <= cfg.n_hi; ++k) {
      if (!cfg.list_elements) {
        out << k << "," << sizes[k] << "\n";
        continue;
      }
      for (const auto& e : sphere(k)) out << k << "," << sizes[k] << "," << csv_field(group.format(e)) << "\n";
    }
  } else {
    for (std::size_t k = 0; k <= cfg.n_hi; ++k) {
      out << k << " " << sizes[k];
      if (cfg.list_elements) {
        out << " :";
        for (const auto& e : sphere(k)) out << " " << group.format(e);
      }
      out << "\n";
    }
  }
  return 0;
}

int cmd_kernel(const RunConfig& cfg, std::shared_ptr<const GroupModel> group, std::ostream& out) {
  auto kernel = make_kernel(group, cfg.kernel);
  const Element x = group->parse(cfg.elements[0]);
  const Element y = group->parse(cfg.elements[1]);
  const Rational u = kernel->value(x, y, cfg.n_hi);
  switch (cfg.format) {
    case OutputFormat::text: out << to_string(u) << "\n"; break;
    case OutputFormat::csv:
      out << "group,kernel,x,y,n,value\n"
          << csv_field(cfg.group) << "," << cfg.kernel << "," << csv_field(cfg.elements[0]) << ","
          << csv_field(cfg.elements[1]) << "," << cfg.n_hi << "," << to_string(u) << "\n";
      break;
    case OutputFormat::json: {
      nlohmann::ordered_json j;
      j["group"] = cfg.group;
      j["kernel"] = cfg.kernel;
      j["x"] = cfg.elements[0];
      j["y"] = cfg.elements[1];
      j["n"] = cfg.n_hi;
      j["value"] = to_string(u);
      out << j.dump(2) << "\n";
      break;
    }
  }
  return 0;
}

int cmd_defect(const RunConfig& cfg, std::shared_ptr<const GroupModel> group, std::ostream& out) {
  const FolnerSequenceProvider provider(group, parse_strategy(cfg.kernel));
  const Element g = group->parse(cfg.elements[0]);
  const std::size_t count = cfg.n_hi - cfg.n_lo + 1;
  std::vector<Rational> values(count);
  parallel_for(count, [&](std::size_t i) { values[i] = provider.defect(g, cfg.n_lo + i); });

  switch (cfg.format) {
    case OutputFormat::text:
      for (std::size_t i = 0; i < count; ++i) out << cfg.n_lo + i << " " << to_string(values[i]) << "\n";
      break;
    case OutputFormat::csv:
      out << "n,defect\n";
      for (std::size_t i = 0; i < count; ++i) out << cfg.n_lo + i << "," << to_string(values[i]) << "\n";
      break;
    case OutputFormat::json: {
      nlohmann::ordered_json j;
      j["group"] = cfg.group;
      j["provider"] = cfg.kernel;
      j["advertised_folner"] = provider.advertised_folner();
      j["g"] = cfg.elements[0];
      nlohmann::ordered_json rows = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < count; ++i) rows.push_back({{"n", cfg.n_lo + i}, {"defect", to_string(values[i])}});
      j["defect"] = rows;
      out << j.dump(2) << "\n";
      break;
    }
  }
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::shared_ptr<const GroupModel> group, std::ostream& out) {
  const auto E = resolve_E(*group, cfg.E);
  auto kernel = make_kernel(group, cfg.kernel);
  PropertyOCertificate cert;
  if (auto* tree = dynamic_cast<const TreeKernel*>(kernel.get()))
    cert = verify_property_o(*tree, E, cfg.eps, cfg.sample);
  else
    cert = verify_property_o(static_cast<const FolnerKernel&>(*kernel), E, cfg.eps, cfg.sample, cfg.n_max);

  const std::string doc = to_json(cert, *group).dump(2) + "\n";
  if (cfg.out.empty()) {
    out << doc;
  } else {
    std::ofstream file(cfg.out);
    if (!file) throw UsageError("cannot write certificate to '" + cfg.out + "'");
    file << doc;
    out << (cert.pass() ? "PASS" : "FAIL");
    if (!cert.pass()) {
      out << " (failed condition";
      for (int c : cert.failed_conditions()) out << " " << c;
      out << ")";
    }
    out << " " << cfg.out << "\n";
  }
  return cert.pass() ? 0 : 1;
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    auto group = make_group(cfg.group, cfg.budget);
    if (cfg.command == "ball") return cmd_ball(cfg, *group, out);
    if (cfg.command == "kernel") return cmd_kernel(cfg, group, out);
    if (cfg.command == "defect") return cmd_defect(cfg, group, out);
    if (cfg.command == "verify") return cmd_verify(cfg, group, out);
    err << "unknown command '" << cfg.command << "'\n";
    return 2;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const GroupError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  if (cfg.command.empty()) return 0;
  return execute(cfg, out, err);
}

}  // namespace ozawa::cli

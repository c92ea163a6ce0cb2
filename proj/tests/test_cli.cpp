#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using namespace ozawa;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ozawa_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("ball growth tables") {
  CHECK(run_cli({"ball", "free:2", "3"}).out == "0 1\n1 5\n2 17\n3 53\n");
  CHECK(run_cli({"ball", "abelian:2", "2"}).out == "0 1\n1 5\n2 13\n");
  const auto c5 = run_cli({"ball", "cyclic:5", "4", "--format", "csv"});
  CHECK(c5.code == 0);
  CHECK(c5.out == "radius,size\n0,1\n1,3\n2,5\n3,5\n4,5\n");
  const auto j = nlohmann::json::parse(run_cli({"ball", "heisenberg", "1", "--format", "json"}).out);
  CHECK(j["sizes"] == nlohmann::json::array({1, 5}));
  CHECK(run_cli({"ball", "free:2", "1", "--elements"}).out == "0 1 : e\n1 5 : a A b B\n");
}

TEST_CASE("kernel values") {
  CHECK(run_cli({"kernel", "free:2", "tree", "e", "a", "--n", "4"}).out == "4/5\n");
  CHECK(run_cli({"kernel", "free:2", "tree", "e", "b", "--n", "2"}).out == "2/3\n");
  CHECK(run_cli({"kernel", "abelian:1", "folner:box", "0", "2", "--n", "4"}).out == "3/5\n");
  CHECK(run_cli({"kernel", "cyclic:7", "folner:whole", "1", "5", "--n", "0"}).out == "1/1\n");
  const auto j = nlohmann::json::parse(run_cli({"kernel", "free:2", "tree", "e", "a", "--n", "4", "--format", "json"}).out);
  CHECK(j["value"] == "4/5");
}

TEST_CASE("defect sweeps") {
  const auto r = run_cli({"defect", "abelian:1", "box", "1", "--n", "1..4"});
  CHECK(r.code == 0);
  CHECK(r.out.find("1 1/1\n2 2/3\n3 1/2\n4 2/5\n") != std::string::npos);
  const auto f = run_cli({"defect", "free:2", "ball", "a", "--n", "1..3", "--format", "csv"});
  CHECK(f.out == "n,defect\n1,6/5\n2,18/17\n3,54/53\n");
}

TEST_CASE("verify exit codes and certificates") {
  const auto pass = run_cli({"verify", "free:2", "tree", "--E", "ball:2", "--eps", "1/10"});
  CHECK(pass.code == 0);
  const auto j = nlohmann::json::parse(pass.out);
  CHECK(j["verdict"] == "PASS");
  CHECK(j["N"] == 39);

  const auto path = temp_file("cert.json");
  const auto fail = run_cli({"verify", "free:2", "folner:ball", "--nmax", "5", "--out", path.string()});
  CHECK(fail.code == 1);
  CHECK(fail.out.rfind("FAIL (failed condition 3)", 0) == 0);
  std::ifstream in(path);
  const auto cert = nlohmann::json::parse(in);
  CHECK(cert["verdict"] == "FAIL");
  CHECK(cert["N"].is_null());
  std::filesystem::remove(path);

  CHECK(run_cli({"verify", "cyclic:7", "folner:whole", "--E", "ball:3", "--eps", "1/100"}).code == 0);
  CHECK(run_cli({"verify", "abelian:2", "folner:box", "--E", "ball:2", "--eps", "1/10"}).code == 0);
}

TEST_CASE("usage and group errors exit with 2") {
  for (const std::vector<std::string>& bad :
       {std::vector<std::string>{"ball", "lamplighter", "2"}, {"kernel", "abelian:2", "tree", "e", "e", "--n", "1"},
        {"kernel", "free:2", "tree", "e", "c", "--n", "1"}, {"verify", "free:2", "tree", "--eps", "0"},
        {"verify", "free:2", "tree", "--eps", "-1/2"}, {"defect", "heisenberg", "box", "e", "--n", "1..2"},
        {"defect", "abelian:1", "box", "1", "--n", "5..2"}, {"ball", "free:2", "3", "--format", "xml"},
        {"frobnicate"}, {}, {"ball", "free:2", "9", "--budget", "100"}}) {
    CAPTURE(bad.size());
    const auto r = run_cli(bad);
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
  }
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("config files mirror the flags and lose to explicit flags") {
  const auto path = temp_file("cfg.toml");
  {
    std::ofstream f(path);
    f << "[verify]\neps = \"1/4\"\nE = \"ball:1\"\n";
  }
  auto cfg = cli::parse_args({"verify", "free:2", "tree", "--config", path.string()}, std::cout);
  CHECK(cfg.eps == make_rational(1, 4));
  CHECK(cfg.E == "ball:1");
  cfg = cli::parse_args({"verify", "free:2", "tree", "--config", path.string(), "--eps", "1/2"}, std::cout);
  CHECK(cfg.eps == make_rational(1, 2));
  std::filesystem::remove(path);
}

TEST_CASE("parse_args round-trips canonical argument lists") {
  std::mt19937_64 rng(2024);
  auto pick = [&](std::initializer_list<const char*> xs) { return std::string(*(xs.begin() + rng() % xs.size())); };
  std::ostringstream sink;
  for (int trial = 0; trial < 200; ++trial) {
    cli::RunConfig c;
    c.command = pick({"ball", "kernel", "defect", "verify"});
    c.group = pick({"free:2", "abelian:3", "heisenberg", "cyclic:9", "product:free:1,cyclic:3"});
    const auto model = make_group(c.group);
    const auto pts = model->ball(2);
    auto element = [&] { return model->format(pts[rng() % pts.size()]); };
    c.format = static_cast<cli::OutputFormat>(rng() % (c.command == "verify" ? 2 : 3));
    c.budget = 1000 + rng() % 100000;
    if (c.command == "ball") {
      c.n_hi = rng() % 10;
      c.list_elements = rng() % 2;
    } else if (c.command == "kernel") {
      c.kernel = pick({"tree", "folner:box", "folner:ball", "folner:whole"});
      c.elements = {element(), element()};
      c.n_lo = c.n_hi = rng() % 50;
    } else if (c.command == "defect") {
      c.kernel = pick({"box", "ball", "whole"});
      c.elements = {element()};
      c.n_lo = rng() % 10;
      c.n_hi = c.n_lo + rng() % 10;
    } else {
      c.kernel = pick({"tree", "folner:box", "folner:ball"});
      c.E = rng() % 2 ? "ball:" + std::to_string(rng() % 4) : "list:" + element();
      c.eps = make_rational(1 + rng() % 5, 1 + rng() % 100);
      c.n_max = rng() % 200;
      c.sample = SampleSpec{rng() % 4, rng() % 30, rng(), 1 + rng() % 10};
      if (rng() % 2) c.out = "cert.json";
    }
    const auto back = cli::parse_args(c.to_args(), sink);
    CAPTURE(trial);
    CHECK(back == c);
  }
}

#include "ozawa/verifier.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>

namespace ozawa {

bool GramSample::is_symmetric() const {
  const std::size_t k = size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (at(i, j) != at(j, i)) return false;
  return true;
}

GramSample gram_matrix(const OzawaKernel& kernel, std::span<const Element> points, std::size_t n, Execution exec) {
  kernel.prepare(n);
  const std::size_t k = points.size();
  GramSample g{{points.begin(), points.end()}, n, kernel.tag(), std::vector<Rational>(k * k)};
  parallel_for(
      k,
      [&](std::size_t i) {
        for (std::size_t j = 0; j < k; ++j) g.entries[i * k + j] = kernel.value(points[i], points[j], n);
      },
      exec);
  return g;
}

namespace {

std::uint64_t fnv_mix(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xffu;
    h *= 1099511628211ULL;
  }
  return h;
}

std::size_t sorted_intersection_size(const std::vector<Element>& a, const std::vector<Element>& b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

// Feature rows in element order, each listing the columns holding a 1.
std::map<Element, std::vector<std::size_t>> feature_rows(std::span<const FeatureColumn> columns) {
  std::map<Element, std::vector<std::size_t>> rows;
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (const Element& v : columns[c].support) rows[v].push_back(c);
  return rows;
}

}  // namespace

std::vector<std::uint64_t> feature_overlap_counts(std::span<const FeatureColumn> columns, Execution exec) {
  const std::size_t k = columns.size();
  std::vector<std::uint64_t> counts(k * k, 0);
  if (exec == Execution::serial) {
    for (const auto& [v, cols] : feature_rows(columns))
      for (std::size_t a : cols)
        for (std::size_t b : cols) ++counts[a * k + b];
    return counts;
  }
  parallel_for(k, [&](std::size_t i) {
    for (std::size_t j = 0; j < k; ++j)
      counts[i * k + j] = sorted_intersection_size(columns[i].support, columns[j].support);
  });
  return counts;
}

FactorizationCertificate certify_psd_exact(const OzawaKernel& kernel, const GramSample& gram, Execution exec) {
  const std::size_t k = gram.size();
  FactorizationCertificate cert;
  if (k == 0) {
    cert.verified = true;
    return cert;
  }
  kernel.prepare(gram.level);

  std::vector<FeatureColumn> columns(k);
  parallel_for(k, [&](std::size_t i) { columns[i] = kernel.features(gram.points[i], gram.level); }, exec);

  cert.scale = columns.front().scale;
  bool uniform_scale = true;
  for (const auto& c : columns) {
    cert.nonzeros += c.support.size();
    if (c.scale != cert.scale) uniform_scale = false;
  }

  const auto rows = feature_rows(columns);
  cert.feature_rows = rows.size();
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& [v, cols] : rows) {
    h = fnv_mix(h, v.coords.size());
    for (std::int64_t c : v.coords) h = fnv_mix(h, static_cast<std::uint64_t>(c));
    h = fnv_mix(h, cols.size());
    for (std::size_t c : cols) h = fnv_mix(h, c);
  }
  cert.hash = h;

  const auto counts = feature_overlap_counts(columns, exec);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (Rational(cert.scale * static_cast<unsigned long>(counts[i * k + j])) != gram.at(i, j)) ++cert.mismatches;
  cert.verified = uniform_scale && cert.mismatches == 0;
  return cert;
}

FactorizationCertificate certify_psd_exact(const OzawaKernel& kernel, std::span<const Element> points, std::size_t n,
                                           Execution exec) {
  return certify_psd_exact(kernel, gram_matrix(kernel, points, n, exec), exec);
}

NumericPsdReport check_psd_numeric(const GramSample& sample, double tolerance) {
  if (!sample.is_symmetric()) throw std::invalid_argument("check_psd_numeric: Gram matrix is not symmetric");
  NumericPsdReport report;
  report.tolerance = tolerance;
  const auto k = static_cast<Eigen::Index>(sample.size());
  if (k == 0) {
    report.pass = true;
    return report;
  }
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      m(i, j) = sample.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("check_psd_numeric: eigensolver did not converge");
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  report.max_eigenvalue = solver.eigenvalues().maxCoeff();
  report.pass = report.min_eigenvalue >= -tolerance * std::max(1.0, report.max_eigenvalue);
  return report;
}

std::size_t find_parameter_tree(std::size_t m, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
  // N + 1 >= ceil((m + 1) / eps)
  mpz_class need = (mpz_class(static_cast<unsigned long>(m + 1)) * eps.get_den() + eps.get_num() - 1) / eps.get_num();
  if (!need.fits_ulong_p()) throw std::overflow_error("find_parameter_tree: N does not fit in 64 bits");
  const std::size_t n = need.get_ui() == 0 ? 0 : need.get_ui() - 1;
  return std::max(m, n);
}

Rational folner_residual(const FolnerSequenceProvider& provider, const Element& g, std::size_t n) {
  const std::size_t size = provider.folner_set(n).size();
  return make_rational(size - provider.intersection_count(g, n), size);
}

std::optional<std::size_t> find_parameter_folner(const FolnerSequenceProvider& provider, std::span<const Element> E,
                                                 const Rational& eps, std::size_t n_max) {
  if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
  for (std::size_t n = 0; n <= n_max; ++n) {
    provider.folner_set(n);
    std::vector<Rational> residual(E.size());
    parallel_for(E.size(), [&](std::size_t i) { residual[i] = folner_residual(provider, E[i], n); });
    if (std::all_of(residual.begin(), residual.end(), [&](const Rational& r) { return r < eps; })) return n;
  }
  return std::nullopt;
}

std::vector<Element> sample_points(const GroupModel& group, const SampleSpec& spec) {
  std::vector<Element> points = group.ball(spec.radius);
  ElementSet seen(points.begin(), points.end());
  std::mt19937_64 rng(spec.seed);
  const auto& gens = group.generators();
  if (gens.empty()) return points;
  std::uniform_int_distribution<std::size_t> length_dist(0, spec.random_word_length);
  std::uniform_int_distribution<std::size_t> letter_dist(0, gens.size() - 1);
  for (std::size_t r = 0; r < spec.random_count; ++r) {
    Element x = group.identity();
    const std::size_t len = length_dist(rng);
    for (std::size_t i = 0; i < len; ++i) x = group.multiply(x, gens[letter_dist(rng)]);
    if (seen.insert(x).second) points.push_back(std::move(x));
  }
  return points;
}

std::vector<Element> punctured_ball(const GroupModel& group, std::size_t r) {
  std::vector<Element> out = group.ball(r);
  const Element e = group.identity();
  std::erase(out, e);
  return out;
}

std::vector<int> PropertyOCertificate::failed_conditions() const {
  std::vector<int> failed;
  if (condition1 == false) failed.push_back(1);
  if (condition2 == false) failed.push_back(2);
  if (condition3 == false) failed.push_back(3);
  return failed;
}

std::vector<int> PropertyOCertificate::unevaluated_conditions() const {
  std::vector<int> missing;
  if (!condition1) missing.push_back(1);
  if (!condition2) missing.push_back(2);
  if (!condition3) missing.push_back(3);
  return missing;
}

namespace {

// Elements of ball(r) in a free group of the given rank.
mpz_class free_ball_size(std::size_t rank, std::size_t r) {
  if (rank == 1) return mpz_class(static_cast<unsigned long>(2 * r + 1));
  mpz_class growth;
  mpz_ui_pow_ui(growth.get_mpz_t(), 2 * rank - 1, r);
  return 1 + mpz_class(static_cast<unsigned long>(2 * rank)) * (growth - 1) /
                 mpz_class(static_cast<unsigned long>(2 * rank - 2));
}

constexpr std::size_t kSupportListingCap = 4096;

void fill_psd(PropertyOCertificate& cert, const OzawaKernel& kernel, const GramSample& gram) {
  cert.factorization = certify_psd_exact(kernel, gram);
  cert.numeric = check_psd_numeric(gram);
  cert.condition1 = cert.factorization.verified && cert.numeric.pass;
}

}  // namespace

PropertyOCertificate verify_property_o(const TreeKernel& kernel, std::span<const Element> E, const Rational& eps,
                                       const SampleSpec& sample) {
  const GroupModel& g = kernel.group();
  PropertyOCertificate cert;
  cert.group = g.descriptor();
  cert.kernel = kernel.tag();
  cert.base = kernel.base_ray_description();
  cert.E.assign(E.begin(), E.end());
  cert.epsilon = eps;
  cert.sample = sample;

  // E ⊆ {z : |z| < m}
  std::size_t m = 1;
  for (const Element& z : E) m = std::max(m, g.word_length(z) + 1);
  const std::size_t N = find_parameter_tree(m, eps);
  cert.N = N;
  cert.level = N;

  const std::size_t radius = 2 * N;
  cert.F.description = "ball:" + std::to_string(radius);
  cert.F.size = free_ball_size(kernel.free_group().rank(), radius);
  if (cert.F.size <= kSupportListingCap) {
    cert.F.listed = true;
    cert.F.elements = g.ball(radius);
    std::sort(cert.F.elements.begin(), cert.F.elements.end());
  }

  cert.points = sample_points(g, sample);
  const GramSample gram = gram_matrix(kernel, cert.points, N);
  fill_psd(cert, kernel, gram);

  const std::size_t k = cert.points.size();
  std::size_t outside = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (gram.at(i, j) == 0) continue;
      ++cert.nonzero_pairs;
      if (g.distance(cert.points[i], cert.points[j]) > radius) ++outside;
    }
  }
  cert.condition2 = outside == 0;

  const Element e = g.identity();
  cert.residuals.resize(E.size());
  parallel_for(E.size(), [&](std::size_t i) {
    Rational r = 1 - kernel.value(e, E[i], N);
    cert.residuals[i] = {E[i], abs(r)};
  });
  cert.condition3 = std::all_of(cert.residuals.begin(), cert.residuals.end(),
                                [&](const auto& r) { return r.second < eps; });
  return cert;
}

PropertyOCertificate verify_property_o(const FolnerKernel& kernel, std::span<const Element> E, const Rational& eps,
                                       const SampleSpec& sample, std::size_t n_max) {
  const GroupModel& g = kernel.group();
  const FolnerSequenceProvider& provider = kernel.provider();
  PropertyOCertificate cert;
  cert.group = g.descriptor();
  cert.kernel = kernel.tag();
  cert.base = to_string(provider.strategy());
  cert.E.assign(E.begin(), E.end());
  cert.epsilon = eps;
  cert.sample = sample;
  cert.n_max = n_max;

  cert.N = find_parameter_folner(provider, E, eps, n_max);
  cert.level = cert.N.value_or(n_max);
  const std::size_t level = cert.level;

  cert.points = sample_points(g, sample);
  const GramSample gram = gram_matrix(kernel, cert.points, level);
  fill_psd(cert, kernel, gram);

  cert.residuals.resize(E.size());
  parallel_for(E.size(), [&](std::size_t i) { cert.residuals[i] = {E[i], folner_residual(provider, E[i], level)}; });
  cert.condition3 = cert.N.has_value() && std::all_of(cert.residuals.begin(), cert.residuals.end(),
                                                       [&](const auto& r) { return r.second < eps; });

  const std::size_t k = cert.points.size();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (gram.at(i, j) != 0) ++cert.nonzero_pairs;

  // Without a qualifying level there is no kernel to bound, so F is not built.
  if (cert.N) {
    cert.F.description = "G_" + std::to_string(level) + " G_" + std::to_string(level) + "^-1";
    cert.F.elements = kernel.support_set(level);
    cert.F.size = static_cast<unsigned long>(cert.F.elements.size());
    cert.F.listed = true;
    std::size_t outside = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (gram.at(i, j) == 0) continue;
        const Element z = g.multiply(g.inverse(cert.points[i]), cert.points[j]);
        if (!std::binary_search(cert.F.elements.begin(), cert.F.elements.end(), z)) ++outside;
      }
    }
    cert.condition2 = outside == 0;
  }
  return cert;
}

nlohmann::ordered_json to_json(const PropertyOCertificate& cert, const GroupModel& group) {
  using nlohmann::ordered_json;
  auto strings = [&](const std::vector<Element>& xs) {
    ordered_json arr = ordered_json::array();
    for (const auto& x : xs) arr.push_back(group.format(x));
    return arr;
  };
  auto condition = [](const std::optional<bool>& c) -> ordered_json {
    if (!c) return nullptr;
    return *c;
  };

  ordered_json j;
  j["group"] = cert.group;
  ordered_json gens = ordered_json::array();
  for (const auto& g : group.generators()) gens.push_back(group.format(g));
  j["generators"] = gens;
  j["kernel"] = cert.kernel;
  if (cert.kernel == "tree") j["gamma0"] = cert.base;
  else j["provider"] = cert.base;
  j["E"] = strings(cert.E);
  j["epsilon"] = to_string(cert.epsilon);
  j["N"] = cert.N ? ordered_json(*cert.N) : ordered_json(nullptr);
  j["level"] = cert.level;
  if (cert.n_max) j["n_max"] = *cert.n_max;

  ordered_json f;
  f["description"] = cert.F.description;
  f["size"] = cert.F.size.get_str();
  f["elements"] = cert.F.listed ? strings(cert.F.elements) : ordered_json(nullptr);
  j["F"] = cert.F.description.empty() ? ordered_json(nullptr) : f;

  ordered_json s;
  s["radius"] = cert.sample.radius;
  s["random"] = cert.sample.random_count;
  s["random_word_length"] = cert.sample.random_word_length;
  s["seed"] = cert.sample.seed;
  s["points"] = strings(cert.points);
  j["sample"] = s;

  ordered_json psd;
  psd["min_eigenvalue"] = cert.numeric.min_eigenvalue;
  psd["max_eigenvalue"] = cert.numeric.max_eigenvalue;
  psd["eigen_tolerance"] = cert.numeric.tolerance;
  psd["numeric_pass"] = cert.numeric.pass;
  psd["factorization_verified"] = cert.factorization.verified;
  psd["factorization_hash"] = [&] {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(cert.factorization.hash));
    return std::string(buf);
  }();
  psd["feature_rows"] = cert.factorization.feature_rows;
  psd["feature_scale"] = to_string(cert.factorization.scale);
  j["psd"] = psd;

  ordered_json res = ordered_json::object();
  for (const auto& [z, r] : cert.residuals) res[group.format(z)] = to_string(r);
  j["residuals"] = res;
  j["nonzero_pairs"] = cert.nonzero_pairs;

  ordered_json conds;
  conds["positive_definite"] = condition(cert.condition1);
  conds["finite_support"] = condition(cert.condition2);
  conds["approximates_one"] = condition(cert.condition3);
  j["conditions"] = conds;
  j["failed_conditions"] = cert.failed_conditions();
  j["unevaluated_conditions"] = cert.unevaluated_conditions();
  j["verdict"] = cert.pass() ? "PASS" : "FAIL";
  return j;
}

}  // namespace ozawa

#pragma once

// Certificates for the three conditions of an Ozawa kernel on a concrete
// instance (finite E, epsilon):
//   (1) u is positive definite      -> exact feature factorization of a Gram
//                                      sample, confirmed by an eigensolve;
//   (2) u(x, y) != 0 => x^{-1}y ∈ F  -> F recorded and checked on the sample;
//   (3) |1 - u(x, y)| < eps on E     -> exact residuals for every z ∈ E.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ozawa/folner_kernel.hpp"
#include "ozawa/group.hpp"
#include "ozawa/kernel.hpp"
#include "ozawa/parallel.hpp"
#include "ozawa/rational.hpp"
#include "ozawa/tree_kernel.hpp"

namespace ozawa {

struct GramSample {
  std::vector<Element> points;
  std::size_t level = 0;
  std::string kernel_tag;
  std::vector<Rational> entries;  // row-major, points.size()^2

  std::size_t size() const noexcept { return points.size(); }
  const Rational& at(std::size_t i, std::size_t j) const { return entries[i * points.size() + j]; }
  bool is_symmetric() const;
};

/// Exact Gram matrix u_n(points[i], points[j]). Points must be distinct.
GramSample gram_matrix(const OzawaKernel& kernel, std::span<const Element> points, std::size_t n,
                       Execution exec = Execution::parallel);

struct FactorizationCertificate {
  bool verified = false;
  std::size_t feature_rows = 0;  // contributing vertices v (tree) or translates g (Følner)
  std::size_t nonzeros = 0;
  Rational scale;
  std::uint64_t hash = 0;  // FNV-1a over the sparse feature matrix
  std::size_t mismatches = 0;
};

/// Builds the 0/1 feature matrix Phi of the sample and checks
/// scale * Phi^T Phi == Gram entrywise in exact arithmetic. Success proves
/// the sample Gram matrix is positive semidefinite.
FactorizationCertificate certify_psd_exact(const OzawaKernel& kernel, const GramSample& gram,
                                           Execution exec = Execution::parallel);
FactorizationCertificate certify_psd_exact(const OzawaKernel& kernel, std::span<const Element> points,
                                           std::size_t n, Execution exec = Execution::parallel);

/// Integer Phi^T Phi, row-major. Serial accumulates feature rows; parallel
/// merges sorted columns pairwise. Both give identical counts.
std::vector<std::uint64_t> feature_overlap_counts(std::span<const FeatureColumn> columns,
                                                  Execution exec = Execution::parallel);

struct NumericPsdReport {
  double min_eigenvalue = 0;
  double max_eigenvalue = 0;
  double tolerance = 0;
  bool pass = false;
};

inline constexpr double kEigenTolerance = 1e-9;

/// Eigenvalues of the double image; pass iff min >= -tolerance * max(1, max).
/// Throws std::invalid_argument on a non-symmetric sample.
NumericPsdReport check_psd_numeric(const GramSample& sample, double tolerance = kEigenTolerance);

/// Smallest N >= m with (m+1)/(N+1) <= eps. Every pair at distance < m then
/// has |1 - u_N| <= (m-1)/(N+1) < eps. Throws std::invalid_argument if eps <= 0.
std::size_t find_parameter_tree(std::size_t m, const Rational& eps);

/// |1 - |gG_n ∩ G_n| / |G_n||.
Rational folner_residual(const FolnerSequenceProvider& provider, const Element& g, std::size_t n);

/// Smallest n <= n_max whose worst residual over E is < eps, or nullopt.
std::optional<std::size_t> find_parameter_folner(const FolnerSequenceProvider& provider, std::span<const Element> E,
                                                 const Rational& eps, std::size_t n_max);

struct SampleSpec {
  std::size_t radius = 2;
  std::size_t random_count = 0;
  std::uint64_t seed = 0;
  std::size_t random_word_length = 6;

  friend bool operator==(const SampleSpec&, const SampleSpec&) = default;
};

/// ball(radius) followed by random_count bounded random words, deduplicated.
std::vector<Element> sample_points(const GroupModel& group, const SampleSpec& spec);

/// ball(r) \ {e}.
std::vector<Element> punctured_ball(const GroupModel& group, std::size_t r);

struct SupportWitness {
  std::string description;
  mpz_class size;
  bool listed = false;
  std::vector<Element> elements;  // populated when listed
};

struct PropertyOCertificate {
  std::string group;
  std::string kernel;
  std::string base;  // base ray for the tree kernel, provider for Følner
  std::vector<Element> E;
  Rational epsilon;
  std::optional<std::size_t> N;
  std::size_t level = 0;  // level at which the conditions were evaluated
  std::optional<std::size_t> n_max;
  SupportWitness F;
  SampleSpec sample;
  std::vector<Element> points;
  FactorizationCertificate factorization;
  NumericPsdReport numeric;
  std::vector<std::pair<Element, Rational>> residuals;
  std::size_t nonzero_pairs = 0;
  std::optional<bool> condition1;
  std::optional<bool> condition2;
  std::optional<bool> condition3;

  bool pass() const { return condition1.value_or(false) && condition2.value_or(false) && condition3.value_or(false); }
  /// Conditions evaluated and found false.
  std::vector<int> failed_conditions() const;
  /// Conditions that could not be evaluated (no qualifying level was found).
  std::vector<int> unevaluated_conditions() const;
};

PropertyOCertificate verify_property_o(const TreeKernel& kernel, std::span<const Element> E, const Rational& eps,
                                       const SampleSpec& sample);
PropertyOCertificate verify_property_o(const FolnerKernel& kernel, std::span<const Element> E, const Rational& eps,
                                       const SampleSpec& sample, std::size_t n_max);

nlohmann::ordered_json to_json(const PropertyOCertificate& cert, const GroupModel& group);

}  // namespace ozawa

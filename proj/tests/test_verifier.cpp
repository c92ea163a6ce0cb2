#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "ozawa/verifier.hpp"

using namespace ozawa;

namespace {

std::vector<Element> parse_all(const GroupModel& g, std::initializer_list<const char*> names) {
  std::vector<Element> out;
  for (const char* n : names) out.push_back(g.parse(n));
  return out;
}

std::shared_ptr<const FolnerSequenceProvider> provider(const char* group, FolnerStrategy s) {
  return std::make_shared<const FolnerSequenceProvider>(make_group(group), s);
}

}  // namespace

TEST_CASE("tree Gram matrix example against the ray oracle") {
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel k(f);
  const auto pts = parse_all(*f, {"e", "a", "b"});
  const auto gram = gram_matrix(k, pts, 2);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      const auto ri = oracle::ray_by_geodesic(*f, pts[i], 2);
      const auto rj = oracle::ray_by_geodesic(*f, pts[j], 2);
      CHECK(gram.at(i, j) == make_rational(oracle::set_overlap(ri, rj), 3));
    }
  const Rational third = make_rational(1, 3), two_thirds = make_rational(2, 3);
  CHECK(gram.entries == std::vector<Rational>{1, two_thirds, two_thirds, two_thirds, 1, third, two_thirds, third, 1});

  const auto one = gram_matrix(k, parse_all(*f, {"a.b"}), 5);
  CHECK(one.entries == std::vector<Rational>{1});
}

TEST_CASE("Følner Gram matrix example") {
  FolnerKernel k(provider("abelian:1", FolnerStrategy::box));
  const auto gram = gram_matrix(k, parse_all(k.group(), {"0", "2"}), 4);
  CHECK(gram.entries == std::vector<Rational>{1, make_rational(3, 5), make_rational(3, 5), 1});
}

TEST_CASE("exact factorization certificates") {
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel tree(f);
  const auto cert = certify_psd_exact(tree, parse_all(*f, {"e", "a", "b"}), 2);
  CHECK(cert.verified);
  CHECK(cert.feature_rows == 5);  // {e, a, a^2, a^3, b}
  CHECK(cert.scale == make_rational(1, 3));
  CHECK(cert.mismatches == 0);

  FolnerKernel whole(provider("cyclic:7", FolnerStrategy::whole));
  const auto pts = whole.group().ball(3);
  const auto gram = gram_matrix(whole, pts, 0);
  for (const auto& v : gram.entries) CHECK(v == 1);
  const auto wc = certify_psd_exact(whole, gram);
  CHECK(wc.verified);
  CHECK(wc.feature_rows == 7);
  CHECK(wc.nonzeros == 7 * pts.size());

  const auto empty = certify_psd_exact(tree, std::vector<Element>{}, 3);
  CHECK(empty.verified);
}

TEST_CASE("factorization detects a tampered Gram matrix") {
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel tree(f);
  auto gram = gram_matrix(tree, f->ball(1), 2);
  gram.entries[1] += make_rational(1, 3);
  const auto cert = certify_psd_exact(tree, gram);
  CHECK_FALSE(cert.verified);
  CHECK(cert.mismatches == 1);
}

TEST_CASE("numeric PSD check") {
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel tree(f);
  // Pairwise distance > 2n: the Gram matrix is the identity.
  const auto far = parse_all(*f, {"b.b.b", "B.B.B", "a.a.a.a.a.a.a", "A.A.A"});
  for (std::size_t i = 0; i < far.size(); ++i)
    for (std::size_t j = i + 1; j < far.size(); ++j) REQUIRE(f->distance(far[i], far[j]) > 2);
  const auto id = check_psd_numeric(gram_matrix(tree, far, 1));
  CHECK(id.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id.pass);

  FolnerKernel whole(provider("cyclic:7", FolnerStrategy::whole));
  const auto ones = check_psd_numeric(gram_matrix(whole, whole.group().ball(3), 0));
  CHECK(std::abs(ones.min_eigenvalue) < 1e-9 * ones.max_eigenvalue);
  CHECK(ones.max_eigenvalue == doctest::Approx(7.0));
  CHECK(ones.pass);

  const auto eab = check_psd_numeric(gram_matrix(tree, parse_all(*f, {"e", "a", "b"}), 2));
  CHECK(eab.min_eigenvalue >= -1e-9);
  CHECK(eab.pass);

  GramSample lopsided{parse_all(*f, {"e", "a"}), 1, "tree", {1, make_rational(1, 2), 0, 1}};
  CHECK_THROWS_AS(check_psd_numeric(lopsided), std::invalid_argument);

  GramSample indefinite{parse_all(*f, {"e", "a"}), 1, "tree", {1, 2, 2, 1}};
  CHECK_FALSE(check_psd_numeric(indefinite).pass);
}

TEST_CASE("find_parameter_tree") {
  CHECK(find_parameter_tree(3, make_rational(1, 10)) == 39);
  CHECK(find_parameter_tree(1, make_rational(1, 2)) == 3);
  CHECK(find_parameter_tree(4, Rational(5)) == 4);
  CHECK(find_parameter_tree(4, Rational(100)) == 4);
  CHECK_THROWS_AS(find_parameter_tree(2, Rational(0)), std::invalid_argument);
  CHECK_THROWS_AS(find_parameter_tree(2, Rational(-1, 3)), std::invalid_argument);

  // Exhaustive residual check on every pair at distance < m.
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel k(f);
  const auto pts = f->ball(3);
  for (std::size_t m = 1; m <= 4; ++m) {
    for (const Rational eps : {make_rational(1, 2), make_rational(1, 10), make_rational(1, 100)}) {
      const std::size_t N = find_parameter_tree(m, eps);
      std::size_t failures = 0;
      for (const auto& x : pts)
        for (const auto& y : pts)
          if (f->distance(x, y) < m && abs(Rational(1 - k.value(x, y, N))) >= eps) ++failures;
      CHECK(failures == 0);
    }
  }
}

TEST_CASE("find_parameter_folner") {
  auto z1 = provider("abelian:1", FolnerStrategy::box);
  const auto E = parse_all(z1->group(), {"-1", "1"});
  // Residual of +-1 on {0..n} is 1/(n+1): first below 1/10 at n = 10.
  CHECK(find_parameter_folner(*z1, E, make_rational(1, 10), 50) == std::optional<std::size_t>(10));
  CHECK(find_parameter_folner(*z1, E, make_rational(1, 10), 9) == std::nullopt);
  const std::vector<Element> just_e{z1->group().identity()};
  CHECK(find_parameter_folner(*z1, just_e, make_rational(1, 10), 5) == std::optional<std::size_t>(0));

  auto f = provider("free:2", FolnerStrategy::ball);
  CHECK(find_parameter_folner(*f, punctured_ball(f->group(), 1), make_rational(1, 10), 8) == std::nullopt);
  for (std::size_t n = 1; n <= 8; ++n) CHECK(folner_residual(*f, f->group().parse("a"), n) > make_rational(1, 2));
  CHECK_THROWS_AS(find_parameter_folner(*z1, E, Rational(0), 3), std::invalid_argument);
}

TEST_CASE("verify: free group with the tree kernel") {
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel k(f);
  const auto E = punctured_ball(*f, 2);
  const auto cert = verify_property_o(k, E, make_rational(1, 10), SampleSpec{});
  CHECK(cert.pass());
  CHECK(cert.N == find_parameter_tree(3, make_rational(1, 10)));
  CHECK(cert.F.description == "ball:78");
  // |ball(k)| in free:2 is 2 * 3^k - 1.
  mpz_class three_pow;
  mpz_ui_pow_ui(three_pow.get_mpz_t(), 3, 78);
  CHECK(cert.F.size == 2 * three_pow - 1);
  CHECK_FALSE(cert.F.listed);
  CHECK(cert.factorization.verified);
  CHECK(cert.residuals.size() == E.size());
  for (const auto& [z, r] : cert.residuals) CHECK(r < make_rational(1, 10));
}

TEST_CASE("verify: finite cyclic group with the whole-group kernel") {
  FolnerKernel k(provider("cyclic:7", FolnerStrategy::whole));
  const auto E = punctured_ball(k.group(), 3);
  const auto cert = verify_property_o(k, E, make_rational(1, 100), SampleSpec{}, 16);
  CHECK(cert.pass());
  CHECK(cert.N == std::optional<std::size_t>(0));
  for (const auto& [z, r] : cert.residuals) CHECK(r == 0);
  CHECK(cert.F.elements.size() == 7);
}

TEST_CASE("verify: free group forced through the Følner path fails condition 3") {
  FolnerKernel k(provider("free:2", FolnerStrategy::ball));
  const auto cert = verify_property_o(k, punctured_ball(k.group(), 1), make_rational(1, 10), SampleSpec{}, 8);
  CHECK_FALSE(cert.pass());
  CHECK(cert.failed_conditions() == std::vector<int>{3});
  CHECK(cert.N == std::nullopt);
  CHECK(cert.condition1 == true);
}

TEST_CASE("verify: Følner residuals are left-invariant") {
  FolnerKernel k(provider("abelian:2", FolnerStrategy::box));
  const auto& g = k.group();
  const auto E = punctured_ball(g, 2);
  const auto cert = verify_property_o(k, E, make_rational(1, 10), SampleSpec{}, 40);
  REQUIRE(cert.pass());
  CHECK(cert.N == std::optional<std::size_t>(20));
  const auto pts = g.ball(2);
  for (const auto& [z, r] : cert.residuals) {
    CHECK(r == abs(Rational(1 - k.value(g.identity(), z, 20))));
    for (const auto& x : pts) {
      const Element y = g.multiply(x, z);
      CHECK(r == abs(Rational(1 - k.value(x, y, 20))));
    }
  }
}

TEST_CASE("certificates are deterministic and JSON carries the documented fields") {
  auto f = std::make_shared<const FreeGroup>(2);
  TreeKernel k(f);
  SampleSpec spec{2, 12, 7, 6};
  const auto E = punctured_ball(*f, 1);
  const auto a = to_json(verify_property_o(k, E, make_rational(1, 4), spec), *f);
  const auto b = to_json(verify_property_o(k, E, make_rational(1, 4), spec), *f);
  CHECK(a.dump() == b.dump());
  for (const char* field : {"group", "kernel", "gamma0", "E", "epsilon", "N", "F", "sample", "psd", "residuals", "verdict"})
    CHECK(a.contains(field));
  CHECK(a["epsilon"] == "1/4");
  CHECK(a["psd"].contains("min_eigenvalue"));
  CHECK(a["psd"]["factorization_verified"] == true);
  CHECK(a["sample"]["seed"] == 7);
  CHECK(a["sample"]["points"].size() > f->ball_size(2));
  CHECK(a["verdict"] == "PASS");
  for (const auto& [key, value] : a["residuals"].items()) CHECK(value.get<std::string>().find('/') != std::string::npos);

  spec.seed = 8;
  const auto c = to_json(verify_property_o(k, E, make_rational(1, 4), spec), *f);
  CHECK(c["sample"]["points"] != a["sample"]["points"]);
}

TEST_CASE("exact PSD implies numeric PSD on random samples") {
  const std::pair<const char*, const char*> configs[] = {
      {"free:2", "tree"}, {"abelian:2", "box"}, {"heisenberg", "ball"}, {"cyclic:7", "whole"}};
  for (auto [group, kind] : configs) {
    auto g = make_group(group);
    std::unique_ptr<OzawaKernel> k;
    if (std::string(kind) == "tree") k = std::make_unique<TreeKernel>(g);
    else k = std::make_unique<FolnerKernel>(std::make_shared<const FolnerSequenceProvider>(g, parse_strategy(kind)));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto pts = sample_points(*g, SampleSpec{0, 20, seed, 5});
      for (std::size_t n : {1u, 3u}) {
        const auto gram = gram_matrix(*k, pts, n);
        CHECK(certify_psd_exact(*k, gram).verified);
        CHECK(check_psd_numeric(gram).pass);
      }
    }
  }
}

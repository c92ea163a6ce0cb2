#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "ozawa/tree_kernel.hpp"

using namespace ozawa;

namespace {

struct Fixture {
  std::shared_ptr<const FreeGroup> fg = std::make_shared<const FreeGroup>(2);
  TreeKernel kernel{fg};

  Element el(const char* s) const { return fg->parse(s); }
  std::vector<std::string> names(const std::vector<Element>& v) const {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(fg->format(e));
    return out;
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "canonical ray examples") {
  CHECK(names(kernel.canonical_ray(el("e"), 3).vertices) == std::vector<std::string>{"e", "a", "a.a", "a.a.a"});
  CHECK(names(kernel.canonical_ray(el("b"), 2).vertices) == std::vector<std::string>{"b", "e", "a"});
  CHECK(names(kernel.canonical_ray(el("a.a.a.b.A"), 4).vertices) ==
        std::vector<std::string>{"a.a.a.b.A", "a.a.a.b", "a.a.a", "a.a.a.a", "a.a.a.a.a"});
  CHECK(kernel.canonical_ray(el("a.b"), 0).vertices == std::vector<Element>{el("a.b")});
  // Rays starting with a^{-1} pass through e before joining the base ray.
  CHECK(names(kernel.canonical_ray(el("A.A"), 4).vertices) ==
        std::vector<std::string>{"A.A", "A", "e", "a", "a.a"});
}

TEST_CASE_FIXTURE(Fixture, "canonical ray matches the geodesic-to-a^K oracle on ball(5)") {
  for (const auto& x : fg->ball(5))
    for (std::size_t n : {0u, 1u, 3u, 7u}) CHECK(kernel.canonical_ray(x, n).vertices == oracle::ray_by_geodesic(*fg, x, n));
}

TEST_CASE_FIXTURE(Fixture, "ray well-definedness") {
  for (const auto& x : fg->ball(6)) {
    const auto ray = kernel.canonical_ray(x, 20);
    REQUIRE(ray.vertices.size() == 21);
    CHECK(ray.vertices.front() == x);
    const auto& last = ray.vertices.back().coords;
    CHECK(!last.empty());
    CHECK(std::all_of(last.begin(), last.end(), [](std::int64_t l) { return l == 1; }));
    std::set<Element> distinct(ray.vertices.begin(), ray.vertices.end());
    CHECK(distinct.size() == ray.vertices.size());
    for (std::size_t i = 0; i + 1 < ray.vertices.size(); ++i)
      CHECK(fg->distance(ray.vertices[i], ray.vertices[i + 1]) == 1);
  }
}

TEST_CASE_FIXTURE(Fixture, "overlap and kernel examples") {
  for (const auto& x : fg->ball(2))
    for (std::size_t n = 0; n < 5; ++n) CHECK(kernel.overlap(x, x, n) == n + 1);
  CHECK(kernel.overlap(el("e"), el("a"), 4) == 4);
  CHECK(kernel.overlap(el("a.a"), el("b"), 1) == 0);
  CHECK(kernel.value(el("e"), el("a"), 4) == make_rational(4, 5));
  CHECK(kernel.value(el("e"), el("b"), 2) == make_rational(2, 3));
  CHECK(kernel.value_via_features(el("e"), el("e"), 5) == 1);
  CHECK(kernel.value_via_features(el("e"), el("a.a.a.a.a"), 2) == 0);
}

TEST_CASE_FIXTURE(Fixture, "closed-form overlap equals oracle ray intersection") {
  const auto pts = fg->ball(3);
  for (std::size_t n : {1u, 2u, 4u}) {
    std::vector<std::vector<Element>> rays;
    for (const auto& x : pts) rays.push_back(oracle::ray_by_geodesic(*fg, x, n));
    std::size_t failures = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = 0; j < pts.size(); ++j)
        if (kernel.overlap(pts[i], pts[j], n) != oracle::set_overlap(rays[i], rays[j])) ++failures;
    CHECK(failures == 0);
  }
}

TEST_CASE_FIXTURE(Fixture, "feature vectors") {
  auto names_of = [&](const TreeFeatureVector& v) {
    auto n = names(v.support);
    return std::set<std::string>(n.begin(), n.end());
  };
  CHECK(names_of(kernel.feature_vector(el("e"), 2)) == std::set<std::string>{"e", "a", "a.a"});
  CHECK(names_of(kernel.feature_vector(el("b"), 2)) == std::set<std::string>{"b", "e", "a"});
  for (const auto& x : fg->ball(3)) {
    for (std::size_t n = 0; n < 6; ++n) {
      const auto fv = kernel.feature_vector(x, n);
      CHECK(fv.support.size() == n + 1);
      CHECK(fv.scale == make_rational(1, n + 1));
      for (const auto& v : fv.support) CHECK(fg->distance(v, x) <= n);
    }
  }
}

TEST_CASE_FIXTURE(Fixture, "symmetry, range, support and sandwich on ball(4)") {
  const auto pts = fg->ball(4);
  std::size_t failures = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    for (const auto& x : pts) {
      for (const auto& y : pts) {
        const Rational u = kernel.value(x, y, n);
        if (u != kernel.value(y, x, n) || u < 0 || u > 1) ++failures;
        const std::size_t d = fg->distance(x, y);
        if (d > 2 * n && u != 0) ++failures;
        // (n - m)/(n + 1) <= u for every m > d with m <= n.
        for (std::size_t m = d + 1; m <= n; ++m)
          if (make_rational(n - m, n + 1) > u) ++failures;
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("k = 1: the tree is a line") {
  auto z = std::make_shared<const FreeGroup>(1);
  TreeKernel kernel(z);
  // On Z the kernel depends only on x - y and on the direction of the base ray.
  for (std::int64_t x = -5; x <= 5; ++x) {
    for (std::int64_t y = -5; y <= 5; ++y) {
      auto elem = [&](std::int64_t v) { return z->word(std::vector<std::int64_t>(static_cast<std::size_t>(std::llabs(v)), v < 0 ? -1 : 1)); };
      const std::size_t n = 6;
      const std::int64_t gap = std::llabs(x - y);
      const std::size_t expected = gap > static_cast<std::int64_t>(n) ? 0 : n + 1 - static_cast<std::size_t>(gap);
      CHECK(kernel.overlap(elem(x), elem(y), n) == expected);
    }
  }
}

TEST_CASE("tree kernel rejects non-free groups") {
  CHECK_THROWS_AS(TreeKernel(make_group("abelian:2")), GroupError);
  TreeKernel k(make_group("free:2"));
  CHECK_THROWS_AS(k.value(make_group("free:3")->parse("a"), k.group().identity(), 2), ModelMismatch);
}

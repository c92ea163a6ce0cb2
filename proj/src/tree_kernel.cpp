#include "ozawa/tree_kernel.hpp"

#include <algorithm>

namespace ozawa {

namespace {

// Length j of the longest prefix a^j (j >= 0) of a reduced word; a is letter 1.
std::size_t leading_a_power(std::span<const std::int64_t> w) {
  std::size_t j = 0;
  while (j < w.size() && w[j] == 1) ++j;
  return j;
}

std::size_t common_prefix(std::span<const std::int64_t> x, std::span<const std::int64_t> y) {
  std::size_t c = 0;
  while (c < x.size() && c < y.size() && x[c] == y[c]) ++c;
  return c;
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

}  // namespace

TreeKernel::TreeKernel(std::shared_ptr<const FreeGroup> group) : group_(std::move(group)) {}

TreeKernel::TreeKernel(std::shared_ptr<const GroupModel> group)
    : group_(std::dynamic_pointer_cast<const FreeGroup>(group)) {
  if (!group_) throw GroupError("the tree kernel needs a free group, got " + group->descriptor());
}

std::string TreeKernel::base_ray_description() const { return "e, a, a^2, a^3, ... (positive powers of a)"; }

GeodesicRaySegment TreeKernel::canonical_ray(const Element& x, std::size_t n) const {
  group_->check(x);
  const auto& w = x.coords;
  const std::size_t j = leading_a_power(w);

  GeodesicRaySegment ray{x, n, {}};
  ray.vertices.reserve(n + 1);
  // Walk down the prefixes of x to a^j, then out along the base ray.
  for (std::size_t len = w.size(); len + 1 > j && ray.vertices.size() <= n; --len) {
    ray.vertices.push_back(group_->word({w.begin(), w.begin() + static_cast<std::ptrdiff_t>(len)}));
    if (len == 0) break;
  }
  for (std::size_t k = j + 1; ray.vertices.size() <= n; ++k)
    ray.vertices.push_back(group_->word(std::vector<std::int64_t>(k, 1)));
  return ray;
}

std::size_t TreeKernel::overlap(const Element& x, const Element& y, std::size_t n) const {
  group_->check(x);
  group_->check(y);
  const auto& wx = x.coords;
  const auto& wy = y.coords;
  const std::size_t jx = leading_a_power(wx);
  const std::size_t jy = leading_a_power(wy);
  const std::size_t c = common_prefix(wx, wy);

  // Distances from x and y to the first vertex their rays share.
  std::size_t dx = 0;
  std::size_t dy = 0;
  if (c >= jx && c >= jy) {
    // The common prefix lies on both rays.
    dx = wx.size() - c;
    dy = wy.size() - c;
  } else {
    // The rays first meet on the base ray at a^J.
    const std::size_t meet = std::max(jx, jy);
    dx = (wx.size() - jx) + (meet - jx);
    dy = (wy.size() - jy) + (meet - jy);
  }
  const std::size_t far = std::max(dx, dy);
  return far > n ? 0 : n + 1 - far;
}

Rational TreeKernel::value(const Element& x, const Element& y, std::size_t n) const {
  return make_rational(overlap(x, y, n), n + 1);
}

TreeFeatureVector TreeKernel::feature_vector(const Element& x, std::size_t n) const {
  auto ray = canonical_ray(x, n);
  std::sort(ray.vertices.begin(), ray.vertices.end());
  return TreeFeatureVector{x, n, std::move(ray.vertices), make_rational(1, n + 1)};
}

Rational TreeKernel::value_via_features(const Element& x, const Element& y, std::size_t n) const {
  const auto fx = feature_vector(x, n);
  const auto fy = feature_vector(y, n);
  return Rational(fx.scale * sorted_intersection_size(fx.support, fy.support));
}

FeatureColumn TreeKernel::features(const Element& x, std::size_t n) const {
  auto f = feature_vector(x, n);
  return FeatureColumn{std::move(f.support), std::move(f.scale)};
}

}  // namespace ozawa

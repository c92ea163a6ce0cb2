#pragma once

// Ray-overlap kernel on the Cayley tree of a free group.
//
// The base ray is fixed as e, a, a^2, ... along the first generator. Every
// vertex x has a unique geodesic ray gamma_x that eventually merges with it,
// and u_n(x, y) = |gamma_x^n ∩ gamma_y^n| / (n + 1), where gamma_x^n is the
// first n + 1 vertices of gamma_x.

#include <cstddef>
#include <memory>
#include <vector>

#include "ozawa/group.hpp"
#include "ozawa/kernel.hpp"
#include "ozawa/rational.hpp"

namespace ozawa {

struct GeodesicRaySegment {
  Element base;
  std::size_t length = 0;
  /// length + 1 vertices, starting at base.
  std::vector<Element> vertices;
};

struct TreeFeatureVector {
  Element owner;
  std::size_t length = 0;
  /// Vertices v with f_v(owner) * chi_{v,n}(owner) = 1, sorted.
  std::vector<Element> support;
  Rational scale;
};

class TreeKernel final : public OzawaKernel {
 public:
  explicit TreeKernel(std::shared_ptr<const FreeGroup> group);
  /// Throws GroupError unless `group` is a free group.
  explicit TreeKernel(std::shared_ptr<const GroupModel> group);

  const GroupModel& group() const noexcept override { return *group_; }
  const FreeGroup& free_group() const noexcept { return *group_; }
  std::string tag() const override { return "tree"; }

  GeodesicRaySegment canonical_ray(const Element& x, std::size_t n) const;

  /// |gamma_x^n ∩ gamma_y^n| from the meeting vertex of the two rays, without
  /// enumerating either ray.
  std::size_t overlap(const Element& x, const Element& y, std::size_t n) const;

  Rational value(const Element& x, const Element& y, std::size_t n) const override;

  TreeFeatureVector feature_vector(const Element& x, std::size_t n) const;
  /// Inner product of explicit feature vectors; equals value() exactly.
  Rational value_via_features(const Element& x, const Element& y, std::size_t n) const;
  FeatureColumn features(const Element& x, std::size_t n) const override;

  /// Human-readable description of the fixed base ray, recorded in certificates.
  std::string base_ray_description() const;

 private:
  std::shared_ptr<const FreeGroup> group_;
};

}  // namespace ozawa

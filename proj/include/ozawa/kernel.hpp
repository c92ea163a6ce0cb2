#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ozawa/group.hpp"
#include "ozawa/rational.hpp"

namespace ozawa {

/// Sparse 0/1 feature column of one point: u(x, y) = scale * |support(x) ∩ support(y)|.
/// `support` is sorted and duplicate-free.
struct FeatureColumn {
  std::vector<Element> support;
  Rational scale;
};

/// A family u_n of kernels on a group that factor through 0/1 features.
/// Implementations must be safe for concurrent calls to every const member
/// once prepare(n) has returned.
class OzawaKernel {
 public:
  virtual ~OzawaKernel() = default;

  virtual const GroupModel& group() const noexcept = 0;
  /// "tree" or "folner:<strategy>".
  virtual std::string tag() const = 0;

  virtual Rational value(const Element& x, const Element& y, std::size_t n) const = 0;
  virtual FeatureColumn features(const Element& x, std::size_t n) const = 0;

  /// Warms any per-level cache so that later const calls only read.
  virtual void prepare(std::size_t /*n*/) const {}
};

}  // namespace ozawa

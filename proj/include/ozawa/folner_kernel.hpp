#pragma once

// Translate-intersection kernel u_n(x, y) = |x G_n ∩ y G_n| / |G_n| over a
// Følner sequence G_n, together with the Følner-set providers.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ozawa/group.hpp"
#include "ozawa/kernel.hpp"
#include "ozawa/rational.hpp"

namespace ozawa {

enum class FolnerStrategy {
  box,    // {0..n}^d in a free abelian group
  ball,   // ball(n); a Følner sequence only under subexponential growth
  whole,  // G_n = G, finite groups only
};

std::string to_string(FolnerStrategy s);
/// Accepts "box", "ball", "whole". Throws ParseError.
FolnerStrategy parse_strategy(std::string_view text);

/// A finite set G_n with O(1) membership.
struct FolnerSet {
  std::vector<Element> elements;
  ElementSet members;

  std::size_t size() const noexcept { return elements.size(); }
  bool contains(const Element& g) const { return members.contains(g); }
};

class FolnerSequenceProvider {
 public:
  /// Throws GroupError if the strategy does not apply to the model (box on a
  /// non-abelian model, whole on an infinite one).
  FolnerSequenceProvider(std::shared_ptr<const GroupModel> group, FolnerStrategy strategy);

  const GroupModel& group() const noexcept { return *group_; }
  std::shared_ptr<const GroupModel> group_ptr() const noexcept { return group_; }
  FolnerStrategy strategy() const noexcept { return strategy_; }

  /// False for the ball strategy on groups of exponential growth, where the
  /// defect does not vanish.
  bool advertised_folner() const noexcept;

  /// G_n, built once per level and cached. Throws BudgetExceeded.
  const FolnerSet& folner_set(std::size_t n) const;

  /// |g G_n ∩ G_n|.
  std::size_t intersection_count(const Element& g, std::size_t n) const;
  /// |g G_n ∪ G_n|.
  std::size_t union_count(const Element& g, std::size_t n) const;
  /// |g G_n △ G_n| / |G_n|, counted directly from the symmetric difference.
  Rational defect(const Element& g, std::size_t n) const;

 private:
  std::shared_ptr<const GroupModel> group_;
  FolnerStrategy strategy_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::unique_ptr<const FolnerSet>> sets_;
};

/// Index set x G_n = {g : x ∈ g G_n^{-1}}.
struct TranslateFeatureIndex {
  Element owner;
  std::size_t level = 0;
  std::vector<Element> indices;  // sorted
};

class FolnerKernel final : public OzawaKernel {
 public:
  explicit FolnerKernel(std::shared_ptr<const FolnerSequenceProvider> provider);

  const GroupModel& group() const noexcept override { return provider_->group(); }
  const FolnerSequenceProvider& provider() const noexcept { return *provider_; }
  std::string tag() const override { return "folner:" + to_string(provider_->strategy()); }

  /// |G_n ∩ x^{-1} y G_n| / |G_n|.
  Rational value(const Element& x, const Element& y, std::size_t n) const override;

  TranslateFeatureIndex translate_feature_index(const Element& x, std::size_t n) const;
  /// |indices(x) ∩ indices(y)| / |G_n|; equals value() exactly.
  Rational value_via_features(const Element& x, const Element& y, std::size_t n) const;
  FeatureColumn features(const Element& x, std::size_t n) const override;

  /// F = G_n G_n^{-1}: u_n(x, y) != 0 exactly when x^{-1} y ∈ F. Sorted.
  std::vector<Element> support_set(std::size_t n) const;
  /// Largest word length over G_n; F is contained in ball(2R).
  std::size_t folner_radius(std::size_t n) const;

  void prepare(std::size_t n) const override { provider_->folner_set(n); }

 private:
  std::shared_ptr<const FolnerSequenceProvider> provider_;
};

}  // namespace ozawa

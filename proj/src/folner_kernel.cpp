#include "ozawa/folner_kernel.hpp"

#include <algorithm>

namespace ozawa {

std::string to_string(FolnerStrategy s) {
  switch (s) {
    case FolnerStrategy::box: return "box";
    case FolnerStrategy::ball: return "ball";
    case FolnerStrategy::whole: return "whole";
  }
  return "?";
}

FolnerStrategy parse_strategy(std::string_view text) {
  if (text == "box") return FolnerStrategy::box;
  if (text == "ball") return FolnerStrategy::ball;
  if (text == "whole") return FolnerStrategy::whole;
  throw ParseError("unknown Følner strategy '" + std::string(text) + "' (expected box, ball or whole)");
}

FolnerSequenceProvider::FolnerSequenceProvider(std::shared_ptr<const GroupModel> group, FolnerStrategy strategy)
    : group_(std::move(group)), strategy_(strategy) {
  if (strategy_ == FolnerStrategy::box && !dynamic_cast<const FreeAbelianGroup*>(group_.get()))
    throw GroupError("the box strategy needs a free abelian group, got " + group_->descriptor());
  if (strategy_ == FolnerStrategy::whole && !group_->is_finite())
    throw GroupError("the whole-group strategy needs a finite group, got " + group_->descriptor());
}

bool FolnerSequenceProvider::advertised_folner() const noexcept {
  return strategy_ != FolnerStrategy::ball || group_->has_polynomial_growth();
}

namespace {

std::vector<Element> box_elements(const FreeAbelianGroup& g, std::size_t n) {
  const std::size_t d = g.dim();
  std::size_t count = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (count > g.budget() / (n + 1))
      throw BudgetExceeded("box of side " + std::to_string(n + 1) + " in " + g.descriptor() +
                           " exceeds the element budget");
    count *= n + 1;
  }
  std::vector<Element> out;
  out.reserve(count);
  std::vector<std::int64_t> v(d, 0);
  for (;;) {
    out.push_back(g.vector(v));
    std::size_t i = 0;
    while (i < d && v[i] == static_cast<std::int64_t>(n)) v[i++] = 0;
    if (i == d) break;
    ++v[i];
  }
  return out;
}

}  // namespace

const FolnerSet& FolnerSequenceProvider::folner_set(std::size_t n) const {
  std::lock_guard lock(mutex_);
  if (auto it = sets_.find(n); it != sets_.end()) return *it->second;

  auto set = std::make_unique<FolnerSet>();
  switch (strategy_) {
    case FolnerStrategy::box:
      set->elements = box_elements(static_cast<const FreeAbelianGroup&>(*group_), n);
      break;
    case FolnerStrategy::ball:
      set->elements = group_->ball(n);
      break;
    case FolnerStrategy::whole:
      // A finite group's ball saturates at its diameter.
      set->elements = group_->ball(group_->budget());
      break;
  }
  set->members.reserve(set->elements.size());
  set->members.insert(set->elements.begin(), set->elements.end());
  const FolnerSet& ref = *set;
  sets_.emplace(n, std::move(set));
  return ref;
}

std::size_t FolnerSequenceProvider::intersection_count(const Element& g, std::size_t n) const {
  group_->check(g);
  const FolnerSet& s = folner_set(n);
  std::size_t count = 0;
  for (const Element& h : s.elements)
    if (s.contains(group_->multiply(g, h))) ++count;
  return count;
}

std::size_t FolnerSequenceProvider::union_count(const Element& g, std::size_t n) const {
  return 2 * folner_set(n).size() - intersection_count(g, n);
}

Rational FolnerSequenceProvider::defect(const Element& g, std::size_t n) const {
  group_->check(g);
  const FolnerSet& s = folner_set(n);
  // gG_n \ G_n plus G_n \ gG_n, the latter as h with g^{-1}h outside G_n.
  const Element g_inv = group_->inverse(g);
  std::size_t sym_diff = 0;
  for (const Element& h : s.elements) {
    if (!s.contains(group_->multiply(g, h))) ++sym_diff;
    if (!s.contains(group_->multiply(g_inv, h))) ++sym_diff;
  }
  return make_rational(sym_diff, s.size());
}

// ---------------------------------------------------------------------------

FolnerKernel::FolnerKernel(std::shared_ptr<const FolnerSequenceProvider> provider)
    : provider_(std::move(provider)) {}

Rational FolnerKernel::value(const Element& x, const Element& y, std::size_t n) const {
  const GroupModel& g = group();
  const Element z = g.multiply(g.inverse(x), y);
  return make_rational(provider_->intersection_count(z, n), provider_->folner_set(n).size());
}

TranslateFeatureIndex FolnerKernel::translate_feature_index(const Element& x, std::size_t n) const {
  const GroupModel& g = group();
  g.check(x);
  const FolnerSet& s = provider_->folner_set(n);
  TranslateFeatureIndex out{x, n, {}};
  out.indices.reserve(s.size());
  for (const Element& h : s.elements) out.indices.push_back(g.multiply(x, h));
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

Rational FolnerKernel::value_via_features(const Element& x, const Element& y, std::size_t n) const {
  const auto ix = translate_feature_index(x, n);
  const auto iy = translate_feature_index(y, n);
  std::vector<Element> common;
  std::set_intersection(ix.indices.begin(), ix.indices.end(), iy.indices.begin(), iy.indices.end(),
                        std::back_inserter(common));
  return make_rational(common.size(), provider_->folner_set(n).size());
}

FeatureColumn FolnerKernel::features(const Element& x, std::size_t n) const {
  auto idx = translate_feature_index(x, n);
  return FeatureColumn{std::move(idx.indices), make_rational(1, provider_->folner_set(n).size())};
}

std::vector<Element> FolnerKernel::support_set(std::size_t n) const {
  const GroupModel& g = group();
  const FolnerSet& s = provider_->folner_set(n);
  std::vector<Element> inverses;
  inverses.reserve(s.size());
  for (const Element& h : s.elements) inverses.push_back(g.inverse(h));

  ElementSet product;
  for (const Element& a : s.elements) {
    for (const Element& b : inverses) {
      product.insert(g.multiply(a, b));
      if (product.size() > g.budget())
        throw BudgetExceeded("support set G_n G_n^-1 exceeds the element budget of " + g.descriptor());
    }
  }
  std::vector<Element> out(product.begin(), product.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t FolnerKernel::folner_radius(std::size_t n) const {
  std::size_t r = 0;
  for (const Element& h : provider_->folner_set(n).elements) r = std::max(r, group().word_length(h));
  return r;
}

}  // namespace ozawa

#include "ozawa/group.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <numeric>

namespace ozawa {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ParseError("expected an integer, got '" + std::string(s) + "'");
  return v;
}

// "(a,b,...)" with exactly `arity` entries; a bare integer is accepted when arity == 1.
std::vector<std::int64_t> parse_tuple(std::string_view text, std::size_t arity) {
  text = trim(text);
  if (arity == 1 && !text.empty() && text.front() != '(') return {parse_int(text)};
  if (text.size() < 2 || text.front() != '(' || text.back() != ')')
    throw ParseError("expected a tuple like (1,2), got '" + std::string(text) + "'");
  auto parts = split_top_level(text.substr(1, text.size() - 2));
  if (parts.size() != arity)
    throw ParseError("expected " + std::to_string(arity) + " coordinates in '" + std::string(text) + "'");
  std::vector<std::int64_t> out;
  out.reserve(arity);
  for (const auto& p : parts) out.push_back(parse_int(p));
  return out;
}

std::string format_tuple(std::span<const std::int64_t> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s + ")";
}

}  // namespace

std::size_t ElementHash::operator()(const Element& e) const noexcept {
  std::uint64_t h = e.model ^ 0x9e3779b97f4a7c15ULL;
  for (std::int64_t c : e.coords) {
    h ^= static_cast<std::uint64_t>(c) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::vector<std::string> split_top_level(std::string_view text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '(' || c == '[') ++depth;
    else if (c == ')' || c == ']') --depth;
    else if (c == sep && depth == 0) {
      out.emplace_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.emplace_back(trim(text.substr(start)));
  return out;
}

// ---------------------------------------------------------------------------
// GroupModel

GroupModel::GroupModel(std::string descriptor, std::size_t budget)
    : descriptor_(std::move(descriptor)), tag_(fnv1a(descriptor_)), budget_(budget) {}

void GroupModel::set_generators(std::vector<std::vector<std::int64_t>> generator_coords) {
  generators_.clear();
  for (auto& c : generator_coords) {
    Element g = make(std::move(c));
    if (g.coords == identity_coords()) continue;
    if (std::find(generators_.begin(), generators_.end(), g) == generators_.end())
      generators_.push_back(std::move(g));
  }
}

Element GroupModel::identity() const { return make(identity_coords()); }

void GroupModel::check(const Element& x) const {
  if (x.model != tag_)
    throw ModelMismatch("element does not belong to group " + descriptor_);
  if (!valid_coords(x.coords))
    throw GroupError("malformed element for group " + descriptor_);
}

Element GroupModel::multiply(const Element& x, const Element& y) const {
  check(x);
  check(y);
  return make(multiply_coords(x.coords, y.coords));
}

Element GroupModel::inverse(const Element& x) const {
  check(x);
  return make(inverse_coords(x.coords));
}

std::size_t GroupModel::word_length(const Element& x) const {
  check(x);
  if (auto len = closed_form_length(x.coords)) return *len;
  return bfs_length(x);
}

std::size_t GroupModel::distance(const Element& x, const Element& y) const {
  return word_length(multiply(inverse(x), y));
}

bool GroupModel::grow_layer() const {
  auto& c = cache_;
  if (c.layers.empty()) {
    Element e = identity();
    c.depth.emplace(e, 0);
    c.layers.push_back({std::move(e)});
    c.total = 1;
    return true;
  }
  if (c.saturated) return false;
  const std::size_t next_depth = c.layers.size();
  std::vector<Element> next;
  ElementSet seen_here;
  for (const Element& x : c.layers.back()) {
    for (const Element& g : generators_) {
      Element y = make(multiply_coords(x.coords, g.coords));
      if (c.depth.contains(y) || seen_here.contains(y)) continue;
      if (c.total + next.size() + 1 > budget_)
        throw BudgetExceeded("ball of radius " + std::to_string(next_depth) + " in " + descriptor_ +
                             " exceeds the element budget of " + std::to_string(budget_));
      seen_here.insert(y);
      next.push_back(std::move(y));
    }
  }
  if (next.empty()) {
    c.saturated = true;
    return false;
  }
  for (const Element& y : next) c.depth.emplace(y, next_depth);
  c.total += next.size();
  c.layers.push_back(std::move(next));
  return true;
}

std::size_t GroupModel::bfs_length(const Element& x) const {
  {
    std::shared_lock lock(cache_.mutex);
    if (auto it = cache_.depth.find(x); it != cache_.depth.end()) return it->second;
  }
  std::unique_lock lock(cache_.mutex);
  for (;;) {
    if (auto it = cache_.depth.find(x); it != cache_.depth.end()) return it->second;
    if (!grow_layer()) throw GroupError("element not reachable in " + descriptor_);
  }
}

std::vector<Element> GroupModel::ball(std::size_t n) const {
  {
    std::shared_lock lock(cache_.mutex);
    if (cache_.saturated || cache_.layers.size() > n) {
      std::vector<Element> out;
      const std::size_t upto = std::min(n + 1, cache_.layers.size());
      for (std::size_t k = 0; k < upto; ++k)
        out.insert(out.end(), cache_.layers[k].begin(), cache_.layers[k].end());
      return out;
    }
  }
  {
    std::unique_lock lock(cache_.mutex);
    while (cache_.layers.size() <= n && grow_layer()) {
    }
  }
  return ball(n);
}

std::size_t GroupModel::ball_size(std::size_t n) const {
  {
    std::shared_lock lock(cache_.mutex);
    if (cache_.saturated || cache_.layers.size() > n) {
      std::size_t total = 0;
      const std::size_t upto = std::min(n + 1, cache_.layers.size());
      for (std::size_t k = 0; k < upto; ++k) total += cache_.layers[k].size();
      return total;
    }
  }
  {
    std::unique_lock lock(cache_.mutex);
    while (cache_.layers.size() <= n && grow_layer()) {
    }
  }
  return ball_size(n);
}

std::string GroupModel::format(const Element& x) const {
  check(x);
  return format_coords(x.coords);
}

Element GroupModel::parse(std::string_view text) const {
  text = trim(text);
  if (text == "e") return identity();
  Coords c = parse_coords(text);
  if (!valid_coords(c)) throw ParseError("'" + std::string(text) + "' is not an element of " + descriptor_);
  return make(std::move(c));
}

// ---------------------------------------------------------------------------
// FreeGroup

FreeGroup::FreeGroup(std::size_t rank, std::size_t budget)
    : GroupModel("free:" + std::to_string(rank), budget), rank_(rank) {
  if (rank < 1 || rank > 26) throw GroupError("free group rank must be in 1..26");
  std::vector<Coords> gens;
  for (std::int64_t i = 1; i <= static_cast<std::int64_t>(rank); ++i) {
    gens.push_back({i});
    gens.push_back({-i});
  }
  set_generators(std::move(gens));
}

Element FreeGroup::word(std::vector<std::int64_t> letters) const {
  Coords reduced;
  reduced.reserve(letters.size());
  for (std::int64_t l : letters) {
    if (l == 0 || static_cast<std::size_t>(l < 0 ? -l : l) > rank_)
      throw GroupError("letter out of range for " + descriptor());
    if (!reduced.empty() && reduced.back() == -l) reduced.pop_back();
    else reduced.push_back(l);
  }
  return make(std::move(reduced));
}

GroupModel::Coords FreeGroup::multiply_coords(CoordView x, CoordView y) const {
  std::size_t cancel = 0;
  while (cancel < x.size() && cancel < y.size() && x[x.size() - 1 - cancel] == -y[cancel]) ++cancel;
  Coords out(x.begin(), x.end() - static_cast<std::ptrdiff_t>(cancel));
  out.insert(out.end(), y.begin() + static_cast<std::ptrdiff_t>(cancel), y.end());
  return out;
}

GroupModel::Coords FreeGroup::inverse_coords(CoordView x) const {
  Coords out(x.rbegin(), x.rend());
  for (auto& l : out) l = -l;
  return out;
}

bool FreeGroup::valid_coords(CoordView x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::int64_t l = x[i];
    if (l == 0 || static_cast<std::size_t>(l < 0 ? -l : l) > rank_) return false;
    if (i > 0 && x[i - 1] == -l) return false;
  }
  return true;
}

std::string FreeGroup::format_coords(CoordView x) const {
  if (x.empty()) return "e";
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += '.';
    s += x[i] > 0 ? static_cast<char>('a' + x[i] - 1) : static_cast<char>('A' - x[i] - 1);
  }
  return s;
}

GroupModel::Coords FreeGroup::parse_coords(std::string_view text) const {
  std::vector<std::int64_t> letters;
  for (char c : text) {
    if (c == '.') continue;
    if (c >= 'a' && c <= 'z') letters.push_back(c - 'a' + 1);
    else if (c >= 'A' && c <= 'Z') letters.push_back(-(c - 'A' + 1));
    else throw ParseError("bad letter '" + std::string(1, c) + "' in free-group word '" + std::string(text) + "'");
  }
  try {
    return word(std::move(letters)).coords;
  } catch (const GroupError&) {
    throw ParseError("'" + std::string(text) + "' uses letters outside " + descriptor());
  }
}

// ---------------------------------------------------------------------------
// FreeAbelianGroup

FreeAbelianGroup::FreeAbelianGroup(std::size_t dim, std::size_t budget)
    : GroupModel("abelian:" + std::to_string(dim), budget), dim_(dim) {
  if (dim < 1) throw GroupError("free abelian rank must be >= 1");
  std::vector<Coords> gens;
  for (std::size_t i = 0; i < dim; ++i) {
    Coords plus(dim, 0), minus(dim, 0);
    plus[i] = 1;
    minus[i] = -1;
    gens.push_back(std::move(plus));
    gens.push_back(std::move(minus));
  }
  set_generators(std::move(gens));
}

Element FreeAbelianGroup::vector(std::vector<std::int64_t> v) const {
  if (v.size() != dim_) throw GroupError("vector has wrong dimension for " + descriptor());
  return make(std::move(v));
}

GroupModel::Coords FreeAbelianGroup::multiply_coords(CoordView x, CoordView y) const {
  Coords out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = x[i] + y[i];
  return out;
}

GroupModel::Coords FreeAbelianGroup::inverse_coords(CoordView x) const {
  Coords out(x.begin(), x.end());
  for (auto& v : out) v = -v;
  return out;
}

std::string FreeAbelianGroup::format_coords(CoordView x) const { return format_tuple(x); }

GroupModel::Coords FreeAbelianGroup::parse_coords(std::string_view text) const { return parse_tuple(text, dim_); }

std::optional<std::size_t> FreeAbelianGroup::closed_form_length(CoordView x) const {
  std::size_t len = 0;
  for (std::int64_t v : x) len += static_cast<std::size_t>(v < 0 ? -v : v);
  return len;
}

// ---------------------------------------------------------------------------
// HeisenbergGroup

HeisenbergGroup::HeisenbergGroup(std::size_t budget) : GroupModel("heisenberg", budget) {
  set_generators({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}});
}

GroupModel::Coords HeisenbergGroup::multiply_coords(CoordView a, CoordView b) const {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
}

GroupModel::Coords HeisenbergGroup::inverse_coords(CoordView a) const {
  return {-a[0], -a[1], a[0] * a[1] - a[2]};
}

std::string HeisenbergGroup::format_coords(CoordView x) const { return format_tuple(x); }

GroupModel::Coords HeisenbergGroup::parse_coords(std::string_view text) const { return parse_tuple(text, 3); }

// ---------------------------------------------------------------------------
// CyclicGroup

CyclicGroup::CyclicGroup(std::int64_t order, std::size_t budget)
    : GroupModel("cyclic:" + std::to_string(order), budget), order_(order) {
  if (order < 2) throw GroupError("cyclic group order must be >= 2");
  set_generators({{1}, {order - 1}});
}

Element CyclicGroup::residue(std::int64_t r) const {
  r %= order_;
  if (r < 0) r += order_;
  return make({r});
}

GroupModel::Coords CyclicGroup::multiply_coords(CoordView x, CoordView y) const {
  return {(x[0] + y[0]) % order_};
}

GroupModel::Coords CyclicGroup::inverse_coords(CoordView x) const { return {(order_ - x[0]) % order_}; }

bool CyclicGroup::valid_coords(CoordView x) const { return x.size() == 1 && x[0] >= 0 && x[0] < order_; }

std::string CyclicGroup::format_coords(CoordView x) const { return std::to_string(x[0]); }

GroupModel::Coords CyclicGroup::parse_coords(std::string_view text) const {
  std::int64_t r = parse_tuple(text, 1)[0] % order_;
  if (r < 0) r += order_;
  return {r};
}

// ---------------------------------------------------------------------------
// ProductGroup

ProductGroup::ProductGroup(std::shared_ptr<const GroupModel> left, std::shared_ptr<const GroupModel> right,
                           std::size_t budget)
    : GroupModel("product:" + left->descriptor() + "," + right->descriptor(), budget),
      left_(std::move(left)),
      right_(std::move(right)) {
  std::vector<Coords> gens;
  const Coords le = left_->identity_coords();
  const Coords re = right_->identity_coords();
  for (const Element& g : left_->generators()) gens.push_back(join(g.coords, re));
  for (const Element& h : right_->generators()) gens.push_back(join(le, h.coords));
  set_generators(std::move(gens));
}

GroupModel::Coords ProductGroup::join(CoordView l, CoordView r) {
  Coords out;
  out.reserve(1 + l.size() + r.size());
  out.push_back(static_cast<std::int64_t>(l.size()));
  out.insert(out.end(), l.begin(), l.end());
  out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::pair<GroupModel::CoordView, GroupModel::CoordView> ProductGroup::split(CoordView x) const {
  const auto n = static_cast<std::size_t>(x[0]);
  return {x.subspan(1, n), x.subspan(1 + n)};
}

Element ProductGroup::pair(const Element& l, const Element& r) const {
  left_->check(l);
  right_->check(r);
  return make(join(l.coords, r.coords));
}

GroupModel::Coords ProductGroup::identity_coords() const {
  return join(left_->identity_coords(), right_->identity_coords());
}

GroupModel::Coords ProductGroup::multiply_coords(CoordView x, CoordView y) const {
  auto [xl, xr] = split(x);
  auto [yl, yr] = split(y);
  return join(left_->multiply_coords(xl, yl), right_->multiply_coords(xr, yr));
}

GroupModel::Coords ProductGroup::inverse_coords(CoordView x) const {
  auto [l, r] = split(x);
  return join(left_->inverse_coords(l), right_->inverse_coords(r));
}

bool ProductGroup::valid_coords(CoordView x) const {
  if (x.empty() || x[0] < 0 || static_cast<std::size_t>(x[0]) + 1 > x.size()) return false;
  auto [l, r] = split(x);
  return left_->valid_coords(l) && right_->valid_coords(r);
}

std::string ProductGroup::format_coords(CoordView x) const {
  auto [l, r] = split(x);
  return "[" + left_->format_coords(l) + ";" + right_->format_coords(r) + "]";
}

GroupModel::Coords ProductGroup::parse_coords(std::string_view text) const {
  text = trim(text);
  if (text.size() < 2 || text.front() != '[' || text.back() != ']')
    throw ParseError("expected a product element like [x;y], got '" + std::string(text) + "'");
  auto parts = split_top_level(text.substr(1, text.size() - 2), ';');
  if (parts.size() != 2) throw ParseError("product element needs exactly two components");
  Element l = left_->parse(parts[0]);
  Element r = right_->parse(parts[1]);
  return join(l.coords, r.coords);
}

// ---------------------------------------------------------------------------
// Descriptors

namespace {

std::size_t parse_size(std::string_view& s) {
  std::size_t end = 0;
  while (end < s.size() && s[end] >= '0' && s[end] <= '9') ++end;
  if (end == 0) throw ParseError("expected a size parameter in group descriptor");
  std::size_t v = 0;
  std::from_chars(s.data(), s.data() + end, v);
  s.remove_prefix(end);
  return v;
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (s.starts_with(prefix)) {
    s.remove_prefix(prefix.size());
    return true;
  }
  return false;
}

std::shared_ptr<const GroupModel> parse_descriptor(std::string_view& s, std::size_t budget) {
  if (consume(s, "free:")) return std::make_shared<FreeGroup>(parse_size(s), budget);
  if (consume(s, "abelian:")) return std::make_shared<FreeAbelianGroup>(parse_size(s), budget);
  if (consume(s, "heisenberg")) return std::make_shared<HeisenbergGroup>(budget);
  if (consume(s, "cyclic:")) return std::make_shared<CyclicGroup>(static_cast<std::int64_t>(parse_size(s)), budget);
  if (consume(s, "product:")) {
    auto left = parse_descriptor(s, budget);
    if (!consume(s, ",")) throw ParseError("product descriptor needs two comma-separated factors");
    auto right = parse_descriptor(s, budget);
    return std::make_shared<ProductGroup>(std::move(left), std::move(right), budget);
  }
  throw ParseError("unknown group descriptor '" + std::string(s) + "'");
}

}  // namespace

std::shared_ptr<const GroupModel> make_group(std::string_view descriptor, std::size_t budget) {
  std::string_view s = trim(descriptor);
  try {
    auto g = parse_descriptor(s, budget);
    if (!s.empty()) throw ParseError("trailing text '" + std::string(s) + "' in group descriptor");
    return g;
  } catch (const ParseError&) {
    throw;
  } catch (const GroupError& e) {
    throw ParseError(e.what());
  }
}

std::string canonical_descriptor(std::string_view descriptor) { return make_group(descriptor, 1)->descriptor(); }

}  // namespace ozawa

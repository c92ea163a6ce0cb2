#pragma once

// Concrete finitely generated groups with word metrics and memoized ball
// enumeration over their Cayley graphs. Edges of the Cayley graph are right
// multiplications x -> x*a, so d(x, y) = |x^{-1} y| is left-invariant.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace ozawa {

class GroupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands from two different group models.
class ModelMismatch : public GroupError {
 public:
  using GroupError::GroupError;
};

/// A ball or Følner set would exceed the model's element budget.
class BudgetExceeded : public GroupError {
 public:
  using GroupError::GroupError;
};

class ParseError : public GroupError {
 public:
  using GroupError::GroupError;
};

inline constexpr std::size_t kDefaultElementBudget = 1'000'000;

/// Canonical form of a group element. `model` is the owning model's tag, so
/// structural equality is group equality within a model and elements of
/// different models never compare equal.
struct Element {
  std::uint64_t model = 0;
  std::vector<std::int64_t> coords;

  friend bool operator==(const Element&, const Element&) = default;
  friend auto operator<=>(const Element&, const Element&) = default;
};

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept;
};

using ElementSet = std::unordered_set<Element, ElementHash>;

class GroupModel {
 public:
  virtual ~GroupModel() = default;
  GroupModel(const GroupModel&) = delete;
  GroupModel& operator=(const GroupModel&) = delete;

  const std::string& descriptor() const noexcept { return descriptor_; }
  std::uint64_t tag() const noexcept { return tag_; }
  std::size_t budget() const noexcept { return budget_; }
  /// Symmetric, finite, identity-free.
  const std::vector<Element>& generators() const noexcept { return generators_; }

  Element identity() const;
  Element multiply(const Element& x, const Element& y) const;
  Element inverse(const Element& x) const;
  std::size_t word_length(const Element& x) const;
  std::size_t distance(const Element& x, const Element& y) const;

  /// Elements with word length <= n, in BFS discovery order (deterministic).
  std::vector<Element> ball(std::size_t n) const;
  std::size_t ball_size(std::size_t n) const;

  virtual bool is_finite() const noexcept = 0;
  /// Polynomial (hence subexponential) growth: balls form a Følner sequence.
  virtual bool has_polynomial_growth() const noexcept = 0;

  std::string format(const Element& x) const;
  /// Accepts the model's element syntax, and "e" for the identity.
  Element parse(std::string_view text) const;

  /// Throws ModelMismatch for foreign elements, GroupError for malformed ones.
  void check(const Element& x) const;

 protected:
  GroupModel(std::string descriptor, std::size_t budget);

  void set_generators(std::vector<std::vector<std::int64_t>> generator_coords);
  Element make(std::vector<std::int64_t> coords) const { return Element{tag_, std::move(coords)}; }

  using Coords = std::vector<std::int64_t>;
  using CoordView = std::span<const std::int64_t>;

  virtual Coords identity_coords() const = 0;
  virtual Coords multiply_coords(CoordView x, CoordView y) const = 0;
  virtual Coords inverse_coords(CoordView x) const = 0;
  virtual bool valid_coords(CoordView x) const = 0;
  virtual std::string format_coords(CoordView x) const = 0;
  virtual Coords parse_coords(std::string_view text) const = 0;
  /// Closed-form word length where one exists; BFS otherwise.
  virtual std::optional<std::size_t> closed_form_length(CoordView) const { return std::nullopt; }

  friend class ProductGroup;

 private:
  std::size_t bfs_length(const Element& x) const;
  // Requires cache_.mutex held exclusively.
  bool grow_layer() const;

  std::string descriptor_;
  std::uint64_t tag_;
  std::size_t budget_;
  std::vector<Element> generators_;

  struct BallCache {
    std::shared_mutex mutex;
    std::vector<std::vector<Element>> layers;
    std::unordered_map<Element, std::size_t, ElementHash> depth;
    std::size_t total = 0;
    bool saturated = false;
  };
  mutable BallCache cache_;
};

/// Free group on generators a, b, c, ...; coords are the reduced word with
/// letter +i for the i-th generator (1-based) and -i for its inverse.
class FreeGroup final : public GroupModel {
 public:
  explicit FreeGroup(std::size_t rank, std::size_t budget = kDefaultElementBudget);

  std::size_t rank() const noexcept { return rank_; }
  /// Freely reduces `letters` into a canonical element.
  Element word(std::vector<std::int64_t> letters) const;

  bool is_finite() const noexcept override { return false; }
  bool has_polynomial_growth() const noexcept override { return rank_ <= 1; }

 protected:
  Coords identity_coords() const override { return {}; }
  Coords multiply_coords(CoordView x, CoordView y) const override;
  Coords inverse_coords(CoordView x) const override;
  bool valid_coords(CoordView x) const override;
  std::string format_coords(CoordView x) const override;
  Coords parse_coords(std::string_view text) const override;
  std::optional<std::size_t> closed_form_length(CoordView x) const override { return x.size(); }

 private:
  std::size_t rank_;
};

/// Z^d with generators +-e_i; word length is the L1 norm.
class FreeAbelianGroup final : public GroupModel {
 public:
  explicit FreeAbelianGroup(std::size_t dim, std::size_t budget = kDefaultElementBudget);

  std::size_t dim() const noexcept { return dim_; }
  Element vector(std::vector<std::int64_t> v) const;

  bool is_finite() const noexcept override { return false; }
  bool has_polynomial_growth() const noexcept override { return true; }

 protected:
  Coords identity_coords() const override { return Coords(dim_, 0); }
  Coords multiply_coords(CoordView x, CoordView y) const override;
  Coords inverse_coords(CoordView x) const override;
  bool valid_coords(CoordView x) const override { return x.size() == dim_; }
  std::string format_coords(CoordView x) const override;
  Coords parse_coords(std::string_view text) const override;
  std::optional<std::size_t> closed_form_length(CoordView x) const override;

 private:
  std::size_t dim_;
};

/// Discrete Heisenberg group: (x, y, z) is the matrix [[1,x,z],[0,1,y],[0,0,1]],
/// so (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x*y'). Generators (+-1,0,0), (0,+-1,0).
class HeisenbergGroup final : public GroupModel {
 public:
  explicit HeisenbergGroup(std::size_t budget = kDefaultElementBudget);

  Element triple(std::int64_t x, std::int64_t y, std::int64_t z) const { return make({x, y, z}); }

  bool is_finite() const noexcept override { return false; }
  bool has_polynomial_growth() const noexcept override { return true; }

 protected:
  Coords identity_coords() const override { return {0, 0, 0}; }
  Coords multiply_coords(CoordView x, CoordView y) const override;
  Coords inverse_coords(CoordView x) const override;
  bool valid_coords(CoordView x) const override { return x.size() == 3; }
  std::string format_coords(CoordView x) const override;
  Coords parse_coords(std::string_view text) const override;
};

/// Z/m with generators {+1, -1}; m >= 2.
class CyclicGroup final : public GroupModel {
 public:
  explicit CyclicGroup(std::int64_t order, std::size_t budget = kDefaultElementBudget);

  std::int64_t order() const noexcept { return order_; }
  Element residue(std::int64_t r) const;

  bool is_finite() const noexcept override { return true; }
  bool has_polynomial_growth() const noexcept override { return true; }

 protected:
  Coords identity_coords() const override { return {0}; }
  Coords multiply_coords(CoordView x, CoordView y) const override;
  Coords inverse_coords(CoordView x) const override;
  bool valid_coords(CoordView x) const override;
  std::string format_coords(CoordView x) const override;
  Coords parse_coords(std::string_view text) const override;

 private:
  std::int64_t order_;
};

/// Direct product with componentwise law and the union of the factors'
/// generators. Coords are [len(left), left..., right...]; elements print as
/// "[left;right]".
class ProductGroup final : public GroupModel {
 public:
  ProductGroup(std::shared_ptr<const GroupModel> left, std::shared_ptr<const GroupModel> right,
               std::size_t budget = kDefaultElementBudget);

  const GroupModel& left() const noexcept { return *left_; }
  const GroupModel& right() const noexcept { return *right_; }
  Element pair(const Element& l, const Element& r) const;

  bool is_finite() const noexcept override { return left_->is_finite() && right_->is_finite(); }
  bool has_polynomial_growth() const noexcept override {
    return left_->has_polynomial_growth() && right_->has_polynomial_growth();
  }

 protected:
  Coords identity_coords() const override;
  Coords multiply_coords(CoordView x, CoordView y) const override;
  Coords inverse_coords(CoordView x) const override;
  bool valid_coords(CoordView x) const override;
  std::string format_coords(CoordView x) const override;
  Coords parse_coords(std::string_view text) const override;

 private:
  std::pair<CoordView, CoordView> split(CoordView x) const;
  static Coords join(CoordView l, CoordView r);

  std::shared_ptr<const GroupModel> left_;
  std::shared_ptr<const GroupModel> right_;
};

/// Parses `free:k`, `abelian:d`, `heisenberg`, `cyclic:m`, `product:<desc>,<desc>`.
std::shared_ptr<const GroupModel> make_group(std::string_view descriptor,
                                             std::size_t budget = kDefaultElementBudget);

/// Canonical spelling of a descriptor (e.g. "free:02" -> "free:2").
std::string canonical_descriptor(std::string_view descriptor);

/// Splits "x,y,z" at commas that are not nested inside (), [] brackets.
std::vector<std::string> split_top_level(std::string_view text, char sep = ',');

}  // namespace ozawa

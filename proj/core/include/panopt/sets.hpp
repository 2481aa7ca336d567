#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "panopt/types.hpp"

namespace panopt {

class ConstraintSet;

namespace detail {

struct Ball2 {
  std::optional<Vector> center;  // absent means centered at the origin
  double radius;
};

struct Rectangle {
  Vector lower;  // entries in [-inf, +inf)
  Vector upper;  // entries in (-inf, +inf]
};

struct Zero {};

struct FiniteSet {
  std::vector<Vector> points;
};

struct SecondOrderCone {
  double alpha;  // { (x, t) : ||x|| <= alpha * t }
};

struct CartesianProduct {
  std::vector<Index> ends;  // exclusive end offsets, strictly increasing
  std::vector<ConstraintSet> sets;
};

struct WholeSpace {};

using SetVariant = std::variant<Ball2, Rectangle, Zero, FiniteSet,
                                SecondOrderCone, CartesianProduct, WholeSpace>;

}  // namespace detail

/// Thrown by default_y_set when C has no structurally derived multiplier box.
class UnsupportedSetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A closed set with a computable Euclidean projection.
///
/// Values are immutable after construction and freely shareable across
/// threads; all operations are pure. Infinity-norm balls are stored as the
/// equivalent bound rectangle so every axis-aligned clamp shares one code
/// path.
class ConstraintSet {
 public:
  /// Euclidean ball centered at the origin; works in any ambient dimension.
  static ConstraintSet ball2(double radius);
  static ConstraintSet ball2(Vector center, double radius);
  static ConstraintSet ball_inf(Index dim, double radius);
  static ConstraintSet ball_inf(Vector center, double radius);
  /// Box with entries allowed to be -inf (lower) / +inf (upper). An
  /// all-infinite rectangle is rejected; use whole_space() for that.
  static ConstraintSet rectangle(Vector lower, Vector upper);
  /// The singleton {0}; works in any ambient dimension.
  static ConstraintSet zero();
  static ConstraintSet finite_set(std::vector<Vector> points);
  /// { (x, t) : ||x||_2 <= alpha * t } over the split (head, last coordinate).
  static ConstraintSet second_order_cone(double alpha);
  /// Product of segments given as (exclusive end offset, set) with strictly
  /// increasing offsets; the last offset is the ambient dimension.
  static ConstraintSet cartesian(
      std::vector<std::pair<Index, ConstraintSet>> segments);
  static ConstraintSet whole_space();

  /// Nearest point of the set in the Euclidean norm. Ties in finite sets
  /// resolve to the lowest-index point. `out` must not alias `x`.
  void project_into(Eigen::Ref<const Vector> x, Eigen::Ref<Vector> out) const;
  [[nodiscard]] Vector project(Eigen::Ref<const Vector> x) const;

  [[nodiscard]] double distance(Eigen::Ref<const Vector> x) const;
  /// distance(x)^2 without the square root.
  [[nodiscard]] double squared_distance(Eigen::Ref<const Vector> x) const;

  /// Ambient dimension when the set pins one (rectangles, centered balls,
  /// finite sets, products); nullopt for dimension-free sets.
  [[nodiscard]] std::optional<Index> dimension() const;

  [[nodiscard]] const detail::SetVariant& raw() const { return v_; }

 private:
  explicit ConstraintSet(detail::SetVariant v) : v_(std::move(v)) {}
  detail::SetVariant v_;
};

/// Compact multiplier rectangle derived from the structure of C, one bound
/// pair per row: finite two-sided rows and compact sets map to [-M, M],
/// rows bounded below only to [-M, 0], rows bounded above only to [0, M],
/// with M = 1e12. Throws UnsupportedSetError when C is not a rectangle,
/// {0}, a ball, or a Cartesian product of those.
ConstraintSet default_y_set(const ConstraintSet& set_c, Index n1);

/// Bound magnitude used by default_y_set.
inline constexpr double kDefaultMultiplierBound = 1e12;

}  // namespace panopt

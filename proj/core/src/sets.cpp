#include "panopt/sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace panopt {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument("ConstraintSet: " + msg);
}

void require_all_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) fail(std::string(what) + " must be finite");
}

}  // namespace

ConstraintSet ConstraintSet::ball2(double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) fail("ball2 radius must be positive and finite");
  return ConstraintSet(detail::Ball2{std::nullopt, radius});
}

ConstraintSet ConstraintSet::ball2(Vector center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) fail("ball2 radius must be positive and finite");
  require_all_finite(center, "ball2 center");
  return ConstraintSet(detail::Ball2{std::move(center), radius});
}

ConstraintSet ConstraintSet::ball_inf(Index dim, double radius) {
  if (dim < 1) fail("ball_inf dimension must be positive");
  if (!(radius > 0) || !std::isfinite(radius)) fail("ball_inf radius must be positive and finite");
  return rectangle(Vector::Constant(dim, -radius), Vector::Constant(dim, radius));
}

ConstraintSet ConstraintSet::ball_inf(Vector center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) fail("ball_inf radius must be positive and finite");
  require_all_finite(center, "ball_inf center");
  return rectangle((center.array() - radius).matrix(), (center.array() + radius).matrix());
}

ConstraintSet ConstraintSet::rectangle(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) fail("rectangle bounds must have equal length");
  if (lower.size() == 0) fail("rectangle must have positive dimension");
  bool any_finite = false;
  for (Index i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i])) fail("rectangle bounds must not be NaN");
    if (lower[i] > upper[i]) fail("rectangle requires lower <= upper elementwise");
    any_finite = any_finite || std::isfinite(lower[i]) || std::isfinite(upper[i]);
  }
  if (!any_finite) fail("all-infinite rectangle; use whole_space()");
  return ConstraintSet(detail::Rectangle{std::move(lower), std::move(upper)});
}

ConstraintSet ConstraintSet::zero() { return ConstraintSet(detail::Zero{}); }

ConstraintSet ConstraintSet::finite_set(std::vector<Vector> points) {
  if (points.empty()) fail("finite_set needs at least one point");
  const Index dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) fail("finite_set points must share one dimension");
    require_all_finite(p, "finite_set point");
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i] == points[j]) fail("finite_set points must be pairwise distinct");
  return ConstraintSet(detail::FiniteSet{std::move(points)});
}

ConstraintSet ConstraintSet::second_order_cone(double alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) fail("second_order_cone alpha must be positive and finite");
  return ConstraintSet(detail::SecondOrderCone{alpha});
}

ConstraintSet ConstraintSet::cartesian(
    std::vector<std::pair<Index, ConstraintSet>> segments) {
  if (segments.empty()) fail("cartesian product needs at least one segment");
  detail::CartesianProduct prod;
  Index prev = 0;
  for (auto& [end, set] : segments) {
    if (end <= prev) fail("cartesian segment end offsets must be strictly increasing");
    const Index len = end - prev;
    if (auto d = set.dimension(); d && *d != len)
      fail("cartesian segment set dimension does not match segment length");
    prod.ends.push_back(end);
    prod.sets.push_back(std::move(set));
    prev = end;
  }
  return ConstraintSet(detail::SetVariant{std::move(prod)});
}

ConstraintSet ConstraintSet::whole_space() { return ConstraintSet(detail::WholeSpace{}); }

std::optional<Index> ConstraintSet::dimension() const {
  return std::visit(
      [](const auto& s) -> std::optional<Index> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, detail::Ball2>) {
          if (s.center) return s.center->size();
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, detail::Rectangle>) {
          return s.lower.size();
        } else if constexpr (std::is_same_v<T, detail::FiniteSet>) {
          return s.points.front().size();
        } else if constexpr (std::is_same_v<T, detail::CartesianProduct>) {
          return s.ends.back();
        } else {
          return std::nullopt;
        }
      },
      v_);
}

namespace {

void check_dim(const ConstraintSet& set, Eigen::Ref<const Vector> x) {
  if (auto d = set.dimension(); d && *d != x.size())
    throw std::invalid_argument("ConstraintSet: vector length " + std::to_string(x.size()) +
                                " does not match set dimension " + std::to_string(*d));
}

void project_impl(const detail::SetVariant& v, Eigen::Ref<const Vector> x,
                  Eigen::Ref<Vector> out) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, detail::Ball2>) {
          if (s.center) {
            const double nrm = (x - *s.center).norm();
            if (nrm <= s.radius)
              out = x;
            else
              out = *s.center + (s.radius / nrm) * (x - *s.center);
          } else {
            const double nrm = x.norm();
            if (nrm <= s.radius)
              out = x;
            else
              out = (s.radius / nrm) * x;
          }
        } else if constexpr (std::is_same_v<T, detail::Rectangle>) {
          out = x.cwiseMax(s.lower).cwiseMin(s.upper);
        } else if constexpr (std::is_same_v<T, detail::Zero>) {
          out.setZero();
        } else if constexpr (std::is_same_v<T, detail::FiniteSet>) {
          std::size_t best = 0;
          double best_d2 = (x - s.points[0]).squaredNorm();
          for (std::size_t i = 1; i < s.points.size(); ++i) {
            const double d2 = (x - s.points[i]).squaredNorm();
            if (d2 < best_d2) {
              best_d2 = d2;
              best = i;
            }
          }
          out = s.points[best];
        } else if constexpr (std::is_same_v<T, detail::SecondOrderCone>) {
          const Index m = x.size() - 1;
          const double t = x[m];
          const double nx = x.head(m).norm();
          if (nx <= s.alpha * t) {
            out = x;
          } else if (s.alpha * nx <= -t) {
            out.setZero();
          } else {
            // nx > 0 here: nx == 0 lands in one of the cases above.
            const double beta = (s.alpha * nx + t) / (s.alpha * s.alpha + 1.0);
            out.head(m) = (beta * s.alpha / nx) * x.head(m);
            out[m] = beta;
          }
        } else if constexpr (std::is_same_v<T, detail::CartesianProduct>) {
          Index start = 0;
          for (std::size_t i = 0; i < s.sets.size(); ++i) {
            const Index len = s.ends[i] - start;
            project_impl(s.sets[i].raw(), x.segment(start, len), out.segment(start, len));
            start = s.ends[i];
          }
        } else {  // WholeSpace
          out = x;
        }
      },
      v);
}

}  // namespace

void ConstraintSet::project_into(Eigen::Ref<const Vector> x, Eigen::Ref<Vector> out) const {
  check_dim(*this, x);
  if (out.size() != x.size())
    throw std::invalid_argument("ConstraintSet: output length does not match input");
  project_impl(v_, x, out);
}

Vector ConstraintSet::project(Eigen::Ref<const Vector> x) const {
  Vector out(x.size());
  project_into(x, out);
  return out;
}

double ConstraintSet::squared_distance(Eigen::Ref<const Vector> x) const {
  check_dim(*this, x);
  // Allocation-free fast paths for the shapes that sit inside hot loops.
  if (std::holds_alternative<detail::Zero>(v_)) return x.squaredNorm();
  if (std::holds_alternative<detail::WholeSpace>(v_)) return 0.0;
  if (const auto* r = std::get_if<detail::Rectangle>(&v_)) {
    double d2 = 0;
    for (Index i = 0; i < x.size(); ++i) {
      const double below = r->lower[i] - x[i];
      const double above = x[i] - r->upper[i];
      const double gap = std::max({below, above, 0.0});
      d2 += gap * gap;
    }
    return d2;
  }
  if (const auto* b = std::get_if<detail::Ball2>(&v_)) {
    const double nrm = b->center ? (x - *b->center).norm() : x.norm();
    const double gap = std::max(nrm - b->radius, 0.0);
    return gap * gap;
  }
  Vector proj(x.size());
  project_impl(v_, x, proj);
  return (x - proj).squaredNorm();
}

double ConstraintSet::distance(Eigen::Ref<const Vector> x) const {
  return std::sqrt(squared_distance(x));
}

namespace {

void fill_default_y(const detail::SetVariant& v, Eigen::Ref<Vector> lower,
                    Eigen::Ref<Vector> upper) {
  constexpr double M = kDefaultMultiplierBound;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, detail::Rectangle>) {
          for (Index i = 0; i < s.lower.size(); ++i) {
            const bool lo = std::isfinite(s.lower[i]);
            const bool hi = std::isfinite(s.upper[i]);
            if (lo && hi) {
              lower[i] = -M;
              upper[i] = M;
            } else if (lo) {
              lower[i] = -M;
              upper[i] = 0;
            } else if (hi) {
              lower[i] = 0;
              upper[i] = M;
            } else {
              // Unconstrained row: the only admissible multiplier is zero.
              lower[i] = 0;
              upper[i] = 0;
            }
          }
        } else if constexpr (std::is_same_v<T, detail::Zero> ||
                             std::is_same_v<T, detail::Ball2>) {
          lower.setConstant(-M);
          upper.setConstant(M);
        } else if constexpr (std::is_same_v<T, detail::CartesianProduct>) {
          Index start = 0;
          for (std::size_t i = 0; i < s.sets.size(); ++i) {
            const Index len = s.ends[i] - start;
            fill_default_y(s.sets[i].raw(), lower.segment(start, len),
                           upper.segment(start, len));
            start = s.ends[i];
          }
        } else {
          throw UnsupportedSetError(
              "default_y_set: no structural multiplier bounds for this set; "
              "supply set_y explicitly");
        }
      },
      v);
}

}  // namespace

ConstraintSet default_y_set(const ConstraintSet& set_c, Index n1) {
  if (n1 < 1) throw std::invalid_argument("default_y_set: n1 must be positive");
  if (auto d = set_c.dimension(); d && *d != n1)
    throw std::invalid_argument("default_y_set: set dimension does not match n1");
  Vector lower(n1), upper(n1);
  fill_default_y(set_c.raw(), lower, upper);
  return ConstraintSet::rectangle(std::move(lower), std::move(upper));
}

}  // namespace panopt

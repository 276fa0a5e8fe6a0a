#include "asyncexec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

bool finite(const Vec3& v) { return v.allFinite(); }

void require_finite(const Vec3& v) {
  if (!finite(v)) throw NonFiniteInput("non-finite coordinate in geometry query");
}

// Lexicographic key used to put two primitives into a canonical order so
// that the distance computation is bit-identical for (a, b) and (b, a).
auto canonical_key(const PlacedPrimitive& p) {
  const Vec3 s = p.segment_start();
  const Vec3 e = p.segment_end();
  return std::make_tuple(s.x(), s.y(), s.z(), e.x(), e.y(), e.z(), p.radius());
}

}  // namespace

std::string to_string(const Owner& owner) {
  return fmt::format("{}:{}", owner.group, owner.index);
}

Vec3 PlacedPrimitive::segment_start() const {
  return std::visit(
      [](const auto& s) -> Vec3 {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Sphere>)
          return s.center;
        else
          return s.p0;
      },
      shape);
}

Vec3 PlacedPrimitive::segment_end() const {
  return std::visit(
      [](const auto& s) -> Vec3 {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Sphere>)
          return s.center;
        else
          return s.p1;
      },
      shape);
}

double PlacedPrimitive::radius() const {
  return std::visit([](const auto& s) { return s.radius; }, shape);
}

double segment_segment_distance(const Vec3& a0, const Vec3& a1, const Vec3& b0,
                                const Vec3& b1) {
  require_finite(a0);
  require_finite(a1);
  require_finite(b0);
  require_finite(b1);

  const Vec3 d1 = a1 - a0;
  const Vec3 d2 = b1 - b0;
  const Vec3 r = a0 - b0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  constexpr double kTiny = 1e-24;

  double s = 0.0;
  double t = 0.0;
  if (a <= kTiny && e <= kTiny) return r.norm();
  if (a <= kTiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= kTiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      // Parallel segments: any s works, pick 0 and let the clamps below fix t.
      s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((a0 + s * d1) - (b0 + t * d2)).norm();
}

Clearance primitive_clearance(const PlacedPrimitive& a, const PlacedPrimitive& b) {
  if (!std::isfinite(a.radius()) || !std::isfinite(b.radius()))
    throw NonFiniteInput("non-finite primitive radius");
  const bool swap = canonical_key(b) < canonical_key(a);
  const PlacedPrimitive& first = swap ? b : a;
  const PlacedPrimitive& second = swap ? a : b;
  const double axis = segment_segment_distance(first.segment_start(), first.segment_end(),
                                               second.segment_start(), second.segment_end());
  return Clearance{axis - (first.radius() + second.radius()), {a.owner, b.owner}};
}

Aabb bounding_box(const PlacedPrimitive& p) {
  const Vec3 s = p.segment_start();
  const Vec3 e = p.segment_end();
  const Vec3 r = Vec3::Constant(p.radius());
  return Aabb{s.cwiseMin(e) - r, s.cwiseMax(e) + r};
}

double aabb_lower_bound(const Aabb& a, const Aabb& b) {
  double gap = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    gap = std::max(gap, b.lo[k] - a.hi[k]);
    gap = std::max(gap, a.lo[k] - b.hi[k]);
  }
  return gap > 0.0 ? gap : -std::numeric_limits<double>::infinity();
}

std::vector<std::pair<std::size_t, std::size_t>> broadphase_pairs(
    std::span<const PlacedPrimitive> setA, std::span<const PlacedPrimitive> setB,
    double margin) {
  if (!(margin >= 0.0)) throw ContractViolation("broadphase margin must be >= 0");
  // Small slack keeps the superset guarantee when a gap equals the margin
  // up to rounding.
  const double half = 0.5 * margin + 1e-12;

  struct Interval {
    double lo;
    double hi;
    std::size_t index;
  };
  std::vector<Aabb> boxesA;
  std::vector<Aabb> boxesB;
  boxesA.reserve(setA.size());
  boxesB.reserve(setB.size());
  for (const auto& p : setA) {
    Aabb box = bounding_box(p);
    box.lo.array() -= half;
    box.hi.array() += half;
    boxesA.push_back(box);
  }
  for (const auto& p : setB) {
    Aabb box = bounding_box(p);
    box.lo.array() -= half;
    box.hi.array() += half;
    boxesB.push_back(box);
  }

  // Sweep along x over B sorted by lower bound.
  std::vector<Interval> sortedB;
  sortedB.reserve(boxesB.size());
  for (std::size_t j = 0; j < boxesB.size(); ++j)
    sortedB.push_back({boxesB[j].lo.x(), boxesB[j].hi.x(), j});
  std::sort(sortedB.begin(), sortedB.end(),
            [](const Interval& l, const Interval& r) { return l.lo < r.lo; });

  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < boxesA.size(); ++i) {
    const Aabb& ba = boxesA[i];
    for (const Interval& iv : sortedB) {
      if (iv.lo > ba.hi.x()) break;
      if (iv.hi < ba.lo.x()) continue;
      const Aabb& bb = boxesB[iv.index];
      if (ba.lo.y() <= bb.hi.y() && bb.lo.y() <= ba.hi.y() && ba.lo.z() <= bb.hi.z() &&
          bb.lo.z() <= ba.hi.z())
        out.emplace_back(i, iv.index);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace asyncexec

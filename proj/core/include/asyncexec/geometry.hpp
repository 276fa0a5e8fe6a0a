#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace asyncexec {

using Vec3 = Eigen::Vector3d;

inline constexpr const char* kStaticGroup = "static";

/// Identifies which body a placed primitive belongs to: a robot group and
/// link index, or the "static" group and an obstacle index.
struct Owner {
  std::string group;
  int index = -1;

  friend auto operator<=>(const Owner&, const Owner&) = default;
  friend bool operator==(const Owner&, const Owner&) = default;
};

std::string to_string(const Owner& owner);

using WitnessPair = std::pair<Owner, Owner>;

struct Sphere {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
};

/// Segment p0-p1 swept by a ball. A capsule with p0 == p1 behaves as a sphere.
struct Capsule {
  Vec3 p0 = Vec3::Zero();
  Vec3 p1 = Vec3::Zero();
  double radius = 0.0;
};

using Shape = std::variant<Sphere, Capsule>;

struct PlacedPrimitive {
  Shape shape;
  Owner owner;

  // Core segment of the primitive; spheres collapse to a point.
  Vec3 segment_start() const;
  Vec3 segment_end() const;
  double radius() const;
};

struct Clearance {
  double signed_distance = std::numeric_limits<double>::infinity();
  WitnessPair witness;
};

struct Aabb {
  Vec3 lo;
  Vec3 hi;
};

/// Euclidean distance between the closest points of segments a0-a1 and
/// b0-b1. Zero-length segments are treated as points.
double segment_segment_distance(const Vec3& a0, const Vec3& a1, const Vec3& b0,
                                const Vec3& b1);

/// Surface-to-surface distance (negative on penetration). Exactly symmetric in
/// its arguments; the witness is (a.owner, b.owner).
Clearance primitive_clearance(const PlacedPrimitive& a, const PlacedPrimitive& b);

Aabb bounding_box(const PlacedPrimitive& p);

/// Lower bound on the signed distance of two primitives from their boxes.
/// Returns -inf when the boxes overlap (penetration depth is unbounded).
double aabb_lower_bound(const Aabb& a, const Aabb& b);

/// Every (i, j) with setA[i] and setB[j] whose boxes, each inflated by
/// margin / 2, overlap. Sorted by (i, j). Superset of all pairs with
/// signed_distance <= margin.
std::vector<std::pair<std::size_t, std::size_t>> broadphase_pairs(
    std::span<const PlacedPrimitive> setA, std::span<const PlacedPrimitive> setB,
    double margin);

}  // namespace asyncexec

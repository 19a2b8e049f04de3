#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binpick/geometry.hpp"

namespace binpick {

/// Index-addressed point container. Optional channels (normals, curvatures,
/// labels) are parallel to `points` when non-empty. Downstream modules hold
/// indices into one owning cloud; clouds are treated as immutable while any
/// index or spatial structure built on them is live.
class PointCloud {
 public:
  std::vector<Vec3> points;
  std::vector<Vec3> normals;               // unit length when the flag is set
  std::vector<std::uint8_t> normal_valid;  // parallel to normals
  std::vector<double> curvatures;          // in [0, 1/3] for valid points
  std::vector<int> labels;                 // cluster/object ids, -1 = none

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_curvatures() const { return !curvatures.empty(); }
  bool has_labels() const { return !labels.empty(); }

  void reserve(std::size_t n) { points.reserve(n); }

  /// Appends a point; throws DegenerateInputError on non-finite coordinates.
  void add(const Vec3& p);
  void add(const Vec3& p, int label);

  /// Subset copy keeping all channels present on the source.
  PointCloud select(std::span<const int> indices) const;

  /// Throws Error if any optional channel length disagrees with `points`.
  void check_consistent() const;

  Aabb bounds() const;
};

/// Arithmetic mean of all points. Throws EmptyInputError on an empty cloud.
Vec3 centroid(const PointCloud& cloud);

/// Applies a rigid transform to every point; valid normals are rotated,
/// curvatures and labels carried through unchanged.
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);

}  // namespace binpick

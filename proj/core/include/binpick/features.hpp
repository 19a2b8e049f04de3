#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "binpick/octree.hpp"
#include "binpick/point_cloud.hpp"

namespace binpick {

/// Per-point surface normal and curvature from a local plane fit. A point
/// with fewer than min_neighbors support points (self included) or a fully
/// degenerate neighborhood is flagged invalid.
struct SurfaceFeatures {
  std::vector<Vec3> normals;
  std::vector<std::uint8_t> valid;
  std::vector<double> curvatures;  // smallest-eigenvalue share, in [0, 1/3]

  std::size_t size() const { return normals.size(); }
};

/// Fits a plane to each point's radius neighborhood: the normal is the
/// eigenvector of the neighborhood covariance for the smallest eigenvalue,
/// oriented toward the viewpoint (n . (viewpoint - p) >= 0), and curvature
/// is lambda0 / (lambda0 + lambda1 + lambda2).
///
/// `subset`, when given, restricts the computation to those point indices;
/// other slots stay invalid. Runs in parallel over points (threads <= 0
/// means hardware concurrency).
SurfaceFeatures estimate_features(const PointCloud& cloud, const NeighborIndex& index,
                                  double radius, int min_neighbors,
                                  const Vec3& viewpoint = Vec3::Zero(), int threads = 0,
                                  std::span<const int> subset = {});

}  // namespace binpick

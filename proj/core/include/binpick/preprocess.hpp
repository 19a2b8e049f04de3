#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "binpick/point_cloud.hpp"

namespace binpick {

/// Depth frame in meters, row major, 0 = invalid sample. Intrinsics use the
/// usual pinhole convention (fx, fy focal lengths and cx, cy principal
/// point, all in pixels).
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> depths;  // width * height entries
  double fx = 0, fy = 0, cx = 0, cy = 0;

  double at(int u, int v) const {
    return depths[static_cast<std::size_t>(v) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(u)];
  }
};

/// Plane { p : n . p + d = 0 } with unit normal.
struct PlaneModel {
  Vec3 normal = Vec3::UnitZ();
  double d = 0.0;

  double distance(const Vec3& p) const { return std::abs(normal.dot(p) + d); }
};

struct FilterResult {
  PointCloud cloud;
  std::vector<int> retained;  // original index per output point
};

struct PlaneRemovalResult {
  PlaneModel plane;
  PointCloud remaining;
  std::vector<int> retained;  // original indices of `remaining`
  std::vector<int> removed;   // original indices of the deleted inliers
};

/// Loads a 16-bit PGM (P2 or P5) holding depth in millimeters; intrinsics
/// are filled in by the caller. Throws ParseError / IoError.
DepthImage load_depth_pgm(const std::filesystem::path& path);

/// Back-projects valid pixels: (u,v,z) -> ((u-cx) z/fx, (v-cy) z/fy, z),
/// scanning rows top to bottom.
PointCloud depth_to_cloud(const DepthImage& img);

/// Keeps exactly the points inside or on `box`.
FilterResult passthrough_filter(const PointCloud& cloud, const Aabb& box);

/// One output point per occupied voxel (cube of side `leaf`, grid anchored
/// at the cloud min corner) holding the centroid of its members; outputs
/// ordered by ascending (ix, iy, iz) key. When the input carries labels the
/// output voxel takes the majority label (ties to the smaller label).
PointCloud voxel_downsample(const PointCloud& cloud, double leaf);

/// Largest-consensus plane over seeded RANSAC; the returned cloud is the
/// input with the final inlier set deleted. Deterministic for a fixed seed.
/// Throws InsufficientPointsError (< 3 points) and DegenerateInputError
/// (every sampled triple collinear).
PlaneRemovalResult ransac_remove_plane(const PointCloud& cloud, double dist_thresh,
                                       int iterations, std::uint64_t seed);

}  // namespace binpick

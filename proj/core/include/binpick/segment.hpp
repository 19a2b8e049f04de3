#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binpick/features.hpp"
#include "binpick/octree.hpp"
#include "binpick/point_cloud.hpp"

namespace binpick {

enum class PointRole : std::uint8_t { Core, Border, Noise };

enum class CurvatureRule { Absolute, Difference };

struct DbscanParams {
  double eps = 0.009;           // neighborhood radius (m)
  int min_pts = 10;             // core threshold, the point itself counts
  double theta_th = 0.3490658503988659;  // normal-angle gate, 20 deg
  double c_th = 0.08;           // curvature gate, in [0, 1/3]
  CurvatureRule curvature_rule = CurvatureRule::Absolute;
  int min_cluster_size = 50;    // clusters below this are demoted to noise
  double feature_radius_scale = 2.0;  // feature radius = scale * eps
  int feature_min_neighbors = 6;
  Vec3 viewpoint = Vec3::Zero();  // normal orientation target (sensor position)
  int octree_depth = 8;
  int threads = 0;

  void validate() const;  // throws Error naming the offending field
};

/// Disjoint clusters plus a noise set covering all indices. Cluster ids are
/// the smallest member point index; clusters are ordered by id and each
/// member list is sorted.
struct Segmentation {
  std::vector<std::vector<int>> clusters;
  std::vector<int> noise;
  std::vector<Vec3> centroids;

  int cluster_id(std::size_t k) const { return clusters[k].front(); }
  std::size_t total_points() const;
};

/// Eps-neighborhood lists for every point (self included), each ascending
/// by index. All segmentation stages share one table.
std::vector<std::vector<int>> build_neighbor_table(const PointCloud& cloud,
                                                   const NeighborIndex& index, double eps,
                                                   int threads = 0);

/// Core / border / noise per point: core when its neighborhood has at least
/// min_pts members, border when a core lies in its neighborhood, noise
/// otherwise.
std::vector<PointRole> classify_points(std::span<const std::vector<int>> neighborhoods,
                                       int min_pts);

/// Connected components of the core-core reachability graph. Borders and
/// noise are left unassigned (they sit in the returned noise set).
Segmentation form_core_clusters(const PointCloud& cloud,
                                std::span<const std::vector<int>> neighborhoods,
                                std::span<const PointRole> roles);

/// Assigns each border point to the candidate cluster whose best core
/// shares the most neighborhood members with it, provided the border and
/// that core agree in normal direction (<= theta_th) and pass the
/// curvature rule; borders failing the gates become noise. Ties are broken
/// by shared count, then core distance, then core coordinates, so the
/// partition does not depend on point order.
Segmentation merge_borders(const PointCloud& cloud, const DbscanParams& params,
                           std::span<const std::vector<int>> neighborhoods,
                           std::span<const PointRole> roles, const SurfaceFeatures& features,
                           const Segmentation& seg);

/// Full pipeline over a pluggable neighbor backend: classify, cluster the
/// cores, merge borders, then demote clusters smaller than
/// min_cluster_size to noise.
Segmentation segment_cloud(const PointCloud& cloud, const DbscanParams& params,
                           const NeighborIndex& index);

/// Same, building an octree of params.octree_depth as the backend.
Segmentation segment_cloud(const PointCloud& cloud, const DbscanParams& params);

}  // namespace binpick

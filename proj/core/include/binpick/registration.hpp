#pragma once

#include <span>
#include <string>
#include <vector>

#include "binpick/point_cloud.hpp"
#include "binpick/segment.hpp"

namespace binpick {

/// Centroid plus PCA axes (columns, descending eigenvalue, right-handed).
struct PrincipalFrame {
  Vec3 origin;
  Mat3 axes;
  Vec3 eigenvalues;  // descending, >= 0
};

struct IcpParams {
  int max_iter = 60;
  double eps_converge = 1e-7;  // meters of rmse improvement
  double reject_scale = 5.0;   // drop pairs beyond scale * median distance
  int octree_depth = 8;
  int threads = 0;
};

struct RegistrationResult {
  RigidTransform transform;  // model -> cluster
  double rmse = 0.0;
  int iterations_used = 0;
  bool converged = false;
  std::vector<double> rmse_history;  // one entry per accepted iteration
};

struct ClusterRegistration {
  int cluster_id = -1;
  bool ok = false;
  std::string error;
  RegistrationResult result;
};

/// Population-normalized PCA frame. Throws InsufficientPointsError (< 3
/// points) or DegenerateGeometryError (collinear support).
PrincipalFrame principal_frame(const PointCloud& cloud);

/// Least-squares rigid motion taking `from` onto `to` (matched rows):
/// centroid subtraction plus an orthogonal Procrustes solve with a
/// reflection guard.
RigidTransform solve_rigid(std::span<const Vec3> from, std::span<const Vec3> to);

/// PCA frame alignment of model onto cluster, trying the four right-handed
/// axis-sign combinations and keeping the one with the lowest mean
/// nearest-neighbor distance. Throws DegenerateGeometryError when the
/// cluster spectrum is isotropic (axes carry no information).
RigidTransform coarse_align(const PointCloud& model, const PointCloud& cluster);

/// Point-to-point ICP, model -> cluster. Each iteration matches
/// transformed model points to their nearest cluster point, drops pairs
/// beyond reject_scale * median distance, and solves for the update. An
/// update is kept only if it does not raise the rmse, so rmse_history is
/// non-increasing.
RegistrationResult icp_refine(const PointCloud& model, const PointCloud& cluster,
                              const RigidTransform& init, const IcpParams& params = {});

/// coarse_align + icp_refine per cluster; a cluster that fails coarse
/// alignment is flagged in its entry instead of aborting the batch.
std::vector<ClusterRegistration> register_all(const Segmentation& seg,
                                              const PointCloud& scene,
                                              const PointCloud& model,
                                              const IcpParams& params = {});

}  // namespace binpick

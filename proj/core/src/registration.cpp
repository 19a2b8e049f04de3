#include "binpick/registration.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "binpick/errors.hpp"
#include "binpick/octree.hpp"
#include "binpick/parallel.hpp"

namespace binpick {

PrincipalFrame principal_frame(const PointCloud& cloud) {
  if (cloud.size() < 3) throw InsufficientPointsError("principal frame needs >= 3 points");
  const Vec3 mean = centroid(cloud);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : cloud.points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cloud.size());

  const SymEig3 eig = symmetric_eigen3(cov);  // ascending
  PrincipalFrame frame;
  frame.origin = mean;
  frame.eigenvalues = Vec3(eig.values[2], eig.values[1], eig.values[0]);
  if (!(frame.eigenvalues[0] > 0.0) ||
      frame.eigenvalues[1] <= 1e-12 * frame.eigenvalues[0])
    throw DegenerateGeometryError("points are collinear, covariance rank < 2");

  frame.axes.col(0) = eig.vectors.col(2);
  frame.axes.col(1) = eig.vectors.col(1);
  frame.axes.col(2) = frame.axes.col(0).cross(frame.axes.col(1));
  return frame;
}

RigidTransform solve_rigid(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.size() != to.size()) throw Error("solve_rigid size mismatch");
  if (from.size() < 3) throw InsufficientPointsError("solve_rigid needs >= 3 pairs");

  Vec3 cf = Vec3::Zero(), ct = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    cf += from[i];
    ct += to[i];
  }
  cf /= static_cast<double>(from.size());
  ct /= static_cast<double>(to.size());

  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    h += (from[i] - cf) * (to[i] - ct).transpose();
  }

  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixV() * svd.matrixU().transpose();
  if (r.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixV() * flip * svd.matrixU().transpose();
  }
  return {r, ct - r * cf};
}

RigidTransform coarse_align(const PointCloud& model, const PointCloud& cluster) {
  const PrincipalFrame fm = principal_frame(model);
  const PrincipalFrame fc = principal_frame(cluster);
  if (fc.eigenvalues[0] - fc.eigenvalues[2] <= 1e-9 * fc.eigenvalues[0])
    throw DegenerateGeometryError("isotropic cluster, principal axes undefined");

  const Octree index(cluster, 8);
  const double signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

  RigidTransform best;
  double best_score = std::numeric_limits<double>::infinity();
  for (const auto& s : signs) {
    Mat3 axes_m = fm.axes;
    axes_m.col(0) *= s[0];
    axes_m.col(1) *= s[1];
    axes_m.col(2) = axes_m.col(0).cross(axes_m.col(1));
    RigidTransform t;
    t.rotation = fc.axes * axes_m.transpose();
    t.translation = fc.origin - t.rotation * fm.origin;

    double sum = 0.0;
    for (const Vec3& q : model.points) {
      const Vec3 p = t(q);
      const int nn = index.knn_search(p, 1)[0];
      sum += (cluster.points[static_cast<std::size_t>(nn)] - p).norm();
    }
    const double score = sum / static_cast<double>(model.size());
    if (score < best_score) {
      best_score = score;
      best = t;
    }
  }
  return best;
}

RegistrationResult icp_refine(const PointCloud& model, const PointCloud& cluster,
                              const RigidTransform& init, const IcpParams& params) {
  if (model.empty() || cluster.empty()) throw EmptyInputError("icp on empty cloud");
  if (params.max_iter < 1) throw Error("icp max_iter must be >= 1");

  const Octree index(cluster, params.octree_depth);
  const std::size_t n = model.size();

  RegistrationResult res;
  res.transform = init;
  res.rmse = std::numeric_limits<double>::infinity();

  std::vector<Vec3> moved(n);
  std::vector<double> dists(n);
  std::vector<int> nearest(n);

  for (int iter = 0; iter < params.max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      moved[i] = res.transform(model.points[i]);
      const int nn = index.knn_search(moved[i], 1)[0];
      nearest[i] = nn;
      dists[i] = (cluster.points[static_cast<std::size_t>(nn)] - moved[i]).norm();
    }

    std::vector<double> sorted = dists;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    const double cutoff = params.reject_scale * sorted[n / 2];

    std::vector<Vec3> from, to;
    from.reserve(n);
    to.reserve(n);
    double pre_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (dists[i] > cutoff) continue;
      from.push_back(model.points[i]);
      to.push_back(cluster.points[static_cast<std::size_t>(nearest[i])]);
      pre_sq += dists[i] * dists[i];
    }
    if (from.size() < 3) {
      res.converged = false;
      double all_sq = 0.0;
      for (double d : dists) all_sq += d * d;
      if (res.rmse == std::numeric_limits<double>::infinity())
        res.rmse = std::sqrt(all_sq / static_cast<double>(n));
      break;
    }

    const double prev = res.rmse == std::numeric_limits<double>::infinity()
                            ? std::sqrt(pre_sq / static_cast<double>(from.size()))
                            : res.rmse;

    const RigidTransform candidate = solve_rigid(from, to);
    double post_sq = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      post_sq += (to[i] - candidate(from[i])).squaredNorm();
    }
    const double rmse = std::sqrt(post_sq / static_cast<double>(from.size()));

    if (rmse > prev) {  // no progress under the current correspondences
      res.converged = true;
      break;
    }
    res.transform = candidate;
    res.rmse = rmse;
    res.rmse_history.push_back(rmse);
    res.iterations_used = iter + 1;
    if (prev - rmse < params.eps_converge) {
      res.converged = true;
      break;
    }
  }
  if (res.rmse == std::numeric_limits<double>::infinity()) res.rmse = 0.0;
  return res;
}

std::vector<ClusterRegistration> register_all(const Segmentation& seg,
                                              const PointCloud& scene,
                                              const PointCloud& model,
                                              const IcpParams& params) {
  std::vector<ClusterRegistration> out(seg.clusters.size());
  parallel_for(seg.clusters.size(), params.threads, [&](std::size_t k) {
    ClusterRegistration& entry = out[k];
    entry.cluster_id = seg.cluster_id(k);
    try {
      const PointCloud cluster = scene.select(seg.clusters[k]);
      const RigidTransform init = coarse_align(model, cluster);
      entry.result = icp_refine(model, cluster, init, params);
      entry.ok = true;
    } catch (const Error& e) {
      entry.ok = false;
      entry.error = e.what();
    }
  });
  return out;
}

}  // namespace binpick

#include "binpick/features.hpp"

#include <cmath>
#include <numeric>

#include "binpick/errors.hpp"
#include "binpick/parallel.hpp"

namespace binpick {

SurfaceFeatures estimate_features(const PointCloud& cloud, const NeighborIndex& index,
                                  double radius, int min_neighbors, const Vec3& viewpoint,
                                  int threads, std::span<const int> subset) {
  if (radius <= 0.0) throw Error("feature radius must be > 0");
  if (min_neighbors < 3) throw Error("feature min_neighbors must be >= 3");

  const std::size_t n = cloud.size();
  SurfaceFeatures out;
  out.normals.assign(n, Vec3::Zero());
  out.valid.assign(n, 0);
  out.curvatures.assign(n, 0.0);

  std::vector<int> all;
  if (subset.empty()) {
    all.resize(n);
    std::iota(all.begin(), all.end(), 0);
    subset = all;
  }

  parallel_for(subset.size(), threads, [&](std::size_t si) {
    const int i = subset[si];
    const Vec3& p = cloud.points[static_cast<std::size_t>(i)];
    const std::vector<int> nbrs = index.radius_search(p, radius);
    if (static_cast<int>(nbrs.size()) < min_neighbors) return;

    Vec3 mean = Vec3::Zero();
    for (int j : nbrs) mean += cloud.points[static_cast<std::size_t>(j)];
    mean /= static_cast<double>(nbrs.size());

    Mat3 cov = Mat3::Zero();
    for (int j : nbrs) {
      const Vec3 d = cloud.points[static_cast<std::size_t>(j)] - mean;
      cov += d * d.transpose();
    }
    cov /= static_cast<double>(nbrs.size());

    const SymEig3 eig = symmetric_eigen3(cov);
    const double total = eig.values.sum();
    if (!(total > 1e-18)) return;  // coincident neighborhood

    Vec3 normal = eig.vectors.col(0);
    if (normal.dot(viewpoint - p) < 0.0) normal = -normal;
    out.normals[static_cast<std::size_t>(i)] = normal;
    out.curvatures[static_cast<std::size_t>(i)] = std::max(0.0, eig.values[0]) / total;
    out.valid[static_cast<std::size_t>(i)] = 1;
  });

  return out;
}

}  // namespace binpick

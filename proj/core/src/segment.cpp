#include "binpick/segment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "binpick/errors.hpp"
#include "binpick/parallel.hpp"

namespace binpick {

void DbscanParams::validate() const {
  if (!(eps > 0.0)) throw Error("eps: must be > 0");
  if (min_pts < 1) throw Error("min_pts: must be >= 1");
  if (!(theta_th > 0.0) || theta_th > 1.5707963267948966 + 1e-12)
    throw Error("theta_th: must be in (0, pi/2]");
  if (!(c_th > 0.0)) throw Error("c_th: must be > 0");
  if (min_cluster_size < 1) throw Error("min_cluster_size: must be >= 1");
  if (!(feature_radius_scale > 0.0)) throw Error("feature_radius_scale: must be > 0");
  if (feature_min_neighbors < 3) throw Error("feature_min_neighbors: must be >= 3");
  if (octree_depth < 1 || octree_depth > 21) throw Error("octree_depth: must be in [1, 21]");
}

std::size_t Segmentation::total_points() const {
  std::size_t n = noise.size();
  for (const auto& c : clusters) n += c.size();
  return n;
}

std::vector<std::vector<int>> build_neighbor_table(const PointCloud& cloud,
                                                   const NeighborIndex& index, double eps,
                                                   int threads) {
  std::vector<std::vector<int>> table(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t i) {
    table[i] = index.radius_search(cloud.points[i], eps);
  });
  return table;
}

std::vector<PointRole> classify_points(std::span<const std::vector<int>> neighborhoods,
                                       int min_pts) {
  if (min_pts < 1) throw Error("min_pts: must be >= 1");
  const std::size_t n = neighborhoods.size();
  std::vector<PointRole> roles(n, PointRole::Noise);
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(neighborhoods[i].size()) >= min_pts) roles[i] = PointRole::Core;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] == PointRole::Core) continue;
    for (int j : neighborhoods[i]) {
      if (roles[static_cast<std::size_t>(j)] == PointRole::Core) {
        roles[i] = PointRole::Border;
        break;
      }
    }
  }
  return roles;
}

namespace {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller index as root
    parent[static_cast<std::size_t>(b)] = a;
  }
};

Segmentation finalize_clusters(const PointCloud& cloud,
                               std::vector<std::vector<int>>&& clusters,
                               std::vector<int>&& noise) {
  Segmentation seg;
  for (auto& c : clusters) {
    if (c.empty()) continue;
    std::sort(c.begin(), c.end());
    seg.clusters.push_back(std::move(c));
  }
  std::sort(seg.clusters.begin(), seg.clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  std::sort(noise.begin(), noise.end());
  seg.noise = std::move(noise);
  seg.centroids.reserve(seg.clusters.size());
  for (const auto& c : seg.clusters) {
    Vec3 sum = Vec3::Zero();
    for (int i : c) sum += cloud.points[static_cast<std::size_t>(i)];
    seg.centroids.push_back(sum / static_cast<double>(c.size()));
  }
  return seg;
}

// Number of shared members of two ascending index lists.
int sorted_intersection_count(const std::vector<int>& a, const std::vector<int>& b) {
  int count = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

}  // namespace

Segmentation form_core_clusters(const PointCloud& cloud,
                                std::span<const std::vector<int>> neighborhoods,
                                std::span<const PointRole> roles) {
  const std::size_t n = roles.size();
  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] != PointRole::Core) continue;
    for (int j : neighborhoods[i]) {
      if (roles[static_cast<std::size_t>(j)] == PointRole::Core)
        uf.unite(static_cast<int>(i), j);
    }
  }

  std::unordered_map<int, std::vector<int>> by_root;
  std::vector<int> unassigned;
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] == PointRole::Core) {
      by_root[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
    } else {
      unassigned.push_back(static_cast<int>(i));
    }
  }
  std::vector<std::vector<int>> clusters;
  clusters.reserve(by_root.size());
  for (auto& [root, members] : by_root) clusters.push_back(std::move(members));
  return finalize_clusters(cloud, std::move(clusters), std::move(unassigned));
}

Segmentation merge_borders(const PointCloud& cloud, const DbscanParams& params,
                           std::span<const std::vector<int>> neighborhoods,
                           std::span<const PointRole> roles, const SurfaceFeatures& features,
                           const Segmentation& seg) {
  const std::size_t n = roles.size();
  std::vector<int> cluster_of(n, -1);
  for (std::size_t k = 0; k < seg.clusters.size(); ++k) {
    for (int i : seg.clusters[k]) cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }

  std::vector<int> borders;
  for (std::size_t i = 0; i < n; ++i) {
    if (roles[i] == PointRole::Border) borders.push_back(static_cast<int>(i));
  }

  const double cos_theta_th = std::cos(params.theta_th);
  std::vector<int> assignment(n, -1);

  parallel_for(borders.size(), params.threads, [&](std::size_t bi) {
    const int b = borders[static_cast<std::size_t>(bi)];
    const Vec3& pb = cloud.points[static_cast<std::size_t>(b)];

    // Best reachable core per candidate cluster: most shared neighbors,
    // then nearest, then lexicographically smallest coordinates. The same
    // keys order the clusters themselves, which keeps the partition
    // independent of input point order.
    struct Candidate {
      int count = -1;
      double dist2 = 0.0;
      int core = -1;
      int cluster = -1;
    };
    Candidate best;
    for (int q : neighborhoods[static_cast<std::size_t>(b)]) {
      if (roles[static_cast<std::size_t>(q)] != PointRole::Core) continue;
      const int k = cluster_of[static_cast<std::size_t>(q)];
      if (k < 0) continue;
      Candidate cand;
      cand.count = sorted_intersection_count(neighborhoods[static_cast<std::size_t>(q)],
                                             neighborhoods[static_cast<std::size_t>(b)]);
      cand.dist2 = (cloud.points[static_cast<std::size_t>(q)] - pb).squaredNorm();
      cand.core = q;
      cand.cluster = k;

      bool better = false;
      if (cand.count != best.count) {
        better = cand.count > best.count;
      } else if (cand.dist2 != best.dist2) {
        better = cand.dist2 < best.dist2;
      } else if (best.core >= 0) {
        const Vec3& pc = cloud.points[static_cast<std::size_t>(cand.core)];
        const Vec3& pbst = cloud.points[static_cast<std::size_t>(best.core)];
        if (lex_less(pc, pbst)) {
          better = true;
        } else if (!lex_less(pbst, pc)) {
          better = cand.cluster < best.cluster;
        }
      }
      if (best.core < 0 || better) best = cand;
    }
    if (best.core < 0) return;

    const auto bs = static_cast<std::size_t>(b);
    const auto cs = static_cast<std::size_t>(best.core);
    if (!features.valid[bs] || !features.valid[cs]) return;
    const double cosang =
        std::clamp(features.normals[bs].dot(features.normals[cs]), -1.0, 1.0);
    if (cosang < cos_theta_th) return;
    const bool curvature_ok =
        params.curvature_rule == CurvatureRule::Absolute
            ? features.curvatures[bs] <= params.c_th
            : std::abs(features.curvatures[bs] - features.curvatures[cs]) <= params.c_th;
    if (!curvature_ok) return;
    assignment[bs] = best.cluster;
  });

  std::vector<std::vector<int>> clusters(seg.clusters.begin(), seg.clusters.end());
  std::vector<int> noise;
  for (int i : seg.noise) {
    const int k = assignment[static_cast<std::size_t>(i)];
    if (k >= 0) {
      clusters[static_cast<std::size_t>(k)].push_back(i);
    } else {
      noise.push_back(i);
    }
  }
  return finalize_clusters(cloud, std::move(clusters), std::move(noise));
}

Segmentation segment_cloud(const PointCloud& cloud, const DbscanParams& params,
                           const NeighborIndex& index) {
  params.validate();
  if (cloud.empty()) throw EmptyInputError("segmenting empty cloud");

  const auto neighborhoods = build_neighbor_table(cloud, index, params.eps, params.threads);
  const auto roles = classify_points(neighborhoods, params.min_pts);
  Segmentation cores = form_core_clusters(cloud, neighborhoods, roles);

  // Features are only consulted for border points and the cores reachable
  // from them, so skip the rest of the cloud.
  std::vector<std::uint8_t> needed(cloud.size(), 0);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (roles[i] != PointRole::Border) continue;
    needed[i] = 1;
    for (int q : neighborhoods[i]) {
      if (roles[static_cast<std::size_t>(q)] == PointRole::Core)
        needed[static_cast<std::size_t>(q)] = 1;
    }
  }
  std::vector<int> subset;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (needed[i]) subset.push_back(static_cast<int>(i));
  }
  const SurfaceFeatures features =
      estimate_features(cloud, index, params.eps * params.feature_radius_scale,
                        params.feature_min_neighbors, params.viewpoint, params.threads, subset);

  Segmentation merged = merge_borders(cloud, params, neighborhoods, roles, features, cores);

  std::vector<std::vector<int>> kept;
  std::vector<int> noise = merged.noise;
  for (auto& c : merged.clusters) {
    if (static_cast<int>(c.size()) >= params.min_cluster_size) {
      kept.push_back(std::move(c));
    } else {
      noise.insert(noise.end(), c.begin(), c.end());
    }
  }
  return finalize_clusters(cloud, std::move(kept), std::move(noise));
}

Segmentation segment_cloud(const PointCloud& cloud, const DbscanParams& params) {
  params.validate();
  if (cloud.empty()) throw EmptyInputError("segmenting empty cloud");
  const Octree tree(cloud, params.octree_depth);
  return segment_cloud(cloud, params, tree);
}

}  // namespace binpick

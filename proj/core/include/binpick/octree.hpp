#pragma once

#include <cstdint>
#include <vector>

#include "binpick/point_cloud.hpp"

namespace binpick {

/// Exact neighbor queries over a fixed cloud. Both implementations return
/// identical results: radius_search ascending by index with an inclusive
/// boundary, knn_search ascending by (distance, index).
class NeighborIndex {
 public:
  virtual ~NeighborIndex() = default;
  virtual std::vector<int> radius_search(const Vec3& query, double radius) const = 0;
  virtual std::vector<int> knn_search(const Vec3& query, int k) const = 0;
  virtual std::size_t size() const = 0;
};

/// Fixed-max-depth octree over a point cloud. The root is a tight cube
/// around the cloud (1e-9 relative margin); a node splits only while it
/// holds >= 2 points and depth remains. Points exactly on an internal
/// split plane go to the child on the larger-coordinate side. The cloud
/// must outlive the tree and stay unchanged while queries run; concurrent
/// queries are safe.
class Octree final : public NeighborIndex {
 public:
  Octree(const PointCloud& cloud, int max_depth);

  std::vector<int> radius_search(const Vec3& query, double radius) const override;
  std::vector<int> knn_search(const Vec3& query, int k) const override;
  std::size_t size() const override { return ordered_.size(); }

  const Aabb& root_bounds() const { return root_bounds_; }
  int max_depth() const { return max_depth_; }

  /// Leaf index sets in traversal order; union over all leaves is a
  /// partition of {0..n-1}.
  std::vector<std::vector<int>> leaf_index_sets() const;

 private:
  struct Node {
    Vec3 center;
    double half;             // half edge length
    std::int32_t child[8];   // -1 when absent
    std::uint32_t begin, end;  // range into ordered_
    bool leaf;
  };

  int build_node(std::uint32_t begin, std::uint32_t end, const Vec3& center, double half,
                 int depth);
  void radius_rec(int node_id, const Vec3& q, double r2, std::vector<int>& out) const;
  void knn_rec(int node_id, const Vec3& q, int k,
               std::vector<std::pair<double, int>>& heap) const;

  const PointCloud* cloud_;
  int max_depth_;
  Aabb root_bounds_;
  std::vector<Node> nodes_;
  std::vector<int> ordered_;  // point indices grouped by leaf
};

/// O(n) reference backend with the same query contract.
class LinearScanIndex final : public NeighborIndex {
 public:
  explicit LinearScanIndex(const PointCloud& cloud) : cloud_(&cloud) {}

  std::vector<int> radius_search(const Vec3& query, double radius) const override;
  std::vector<int> knn_search(const Vec3& query, int k) const override;
  std::size_t size() const override { return cloud_->size(); }

 private:
  const PointCloud* cloud_;
};

}  // namespace binpick

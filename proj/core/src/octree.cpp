#include "binpick/octree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "binpick/errors.hpp"

namespace binpick {

namespace {

inline int octant_of(const Vec3& p, const Vec3& center) {
  // On-boundary points go to the larger-coordinate child.
  return (p.x() >= center.x() ? 1 : 0) | (p.y() >= center.y() ? 2 : 0) |
         (p.z() >= center.z() ? 4 : 0);
}

inline double sq_dist_to_cube(const Vec3& q, const Vec3& center, double half) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = std::abs(q[a] - center[a]) - half;
    if (d > 0.0) d2 += d * d;
  }
  return d2;
}

inline double sq_dist_to_far_corner(const Vec3& q, const Vec3& center, double half) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double d = std::abs(q[a] - center[a]) + half;
    d2 += d * d;
  }
  return d2;
}

}  // namespace

Octree::Octree(const PointCloud& cloud, int max_depth)
    : cloud_(&cloud), max_depth_(max_depth) {
  if (cloud.empty()) throw EmptyInputError("octree over empty cloud");
  if (max_depth < 1 || max_depth > 21)
    throw Error("octree max_depth must be in [1, 21], got " + std::to_string(max_depth));

  const Aabb tight = cloud.bounds();
  const double edge = std::max(tight.extent().maxCoeff(), 0.0);
  const double margin = std::max(edge, 1.0) * 1e-9;
  const double half = 0.5 * edge + margin;
  const Vec3 center = tight.center();
  root_bounds_ = {center - Vec3::Constant(half), center + Vec3::Constant(half)};

  ordered_.resize(cloud.size());
  std::iota(ordered_.begin(), ordered_.end(), 0);
  nodes_.reserve(cloud.size() / 2 + 16);
  build_node(0, static_cast<std::uint32_t>(cloud.size()), center, half, 0);
}

int Octree::build_node(std::uint32_t begin, std::uint32_t end, const Vec3& center,
                       double half, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Node& stub = nodes_.back();
  stub.center = center;
  stub.half = half;
  stub.begin = begin;
  stub.end = end;
  std::fill(std::begin(stub.child), std::end(stub.child), -1);
  stub.leaf = (end - begin <= 1) || depth == max_depth_;
  if (nodes_[static_cast<std::size_t>(id)].leaf) return id;

  // Stable partition of the index range into the eight octants.
  std::array<std::vector<int>, 8> buckets;
  const auto& pts = cloud_->points;
  for (std::uint32_t i = begin; i < end; ++i) {
    const int idx = ordered_[i];
    buckets[static_cast<std::size_t>(octant_of(pts[static_cast<std::size_t>(idx)], center))]
        .push_back(idx);
  }
  std::uint32_t cursor = begin;
  std::array<std::pair<std::uint32_t, std::uint32_t>, 8> ranges;
  for (int o = 0; o < 8; ++o) {
    const std::uint32_t b = cursor;
    for (int idx : buckets[static_cast<std::size_t>(o)]) ordered_[cursor++] = idx;
    ranges[static_cast<std::size_t>(o)] = {b, cursor};
  }

  const double h2 = 0.5 * half;
  for (int o = 0; o < 8; ++o) {
    const auto [b, e] = ranges[static_cast<std::size_t>(o)];
    if (b == e) continue;
    const Vec3 child_center(center.x() + ((o & 1) ? h2 : -h2),
                            center.y() + ((o & 2) ? h2 : -h2),
                            center.z() + ((o & 4) ? h2 : -h2));
    const int child_id = build_node(b, e, child_center, h2, depth + 1);
    nodes_[static_cast<std::size_t>(id)].child[o] = child_id;
  }
  return id;
}

void Octree::radius_rec(int node_id, const Vec3& q, double r2,
                        std::vector<int>& out) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (sq_dist_to_far_corner(q, node.center, node.half) <= r2) {
    out.insert(out.end(), ordered_.begin() + node.begin, ordered_.begin() + node.end);
    return;
  }
  if (node.leaf) {
    const auto& pts = cloud_->points;
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const int idx = ordered_[i];
      if ((pts[static_cast<std::size_t>(idx)] - q).squaredNorm() <= r2) out.push_back(idx);
    }
    return;
  }
  for (int o = 0; o < 8; ++o) {
    const int c = node.child[o];
    if (c < 0) continue;
    const Node& child = nodes_[static_cast<std::size_t>(c)];
    if (sq_dist_to_cube(q, child.center, child.half) <= r2) radius_rec(c, q, r2, out);
  }
}

std::vector<int> Octree::radius_search(const Vec3& query, double radius) const {
  std::vector<int> out;
  if (radius <= 0.0) throw Error("radius must be > 0");
  radius_rec(0, query, radius * radius, out);
  std::sort(out.begin(), out.end());
  return out;
}

void Octree::knn_rec(int node_id, const Vec3& q, int k,
                     std::vector<std::pair<double, int>>& heap) const {
  const Node& node = nodes_[static_cast<std::size_t>(node_id)];
  if (node.leaf) {
    const auto& pts = cloud_->points;
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const int idx = ordered_[i];
      const double d2 = (pts[static_cast<std::size_t>(idx)] - q).squaredNorm();
      const std::pair<double, int> cand{d2, idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  // Visit children nearest-first so pruning kicks in early.
  std::array<std::pair<double, int>, 8> order;
  int n = 0;
  for (int o = 0; o < 8; ++o) {
    const int c = node.child[o];
    if (c < 0) continue;
    const Node& child = nodes_[static_cast<std::size_t>(c)];
    order[static_cast<std::size_t>(n++)] = {sq_dist_to_cube(q, child.center, child.half), c};
  }
  std::sort(order.begin(), order.begin() + n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(heap.size()) == k && order[static_cast<std::size_t>(i)].first > heap.front().first)
      break;
    knn_rec(order[static_cast<std::size_t>(i)].second, q, k, heap);
  }
}

std::vector<int> Octree::knn_search(const Vec3& query, int k) const {
  if (k < 1) throw Error("knn k must be >= 1");
  std::vector<std::pair<double, int>> heap;
  heap.reserve(static_cast<std::size_t>(k));
  knn_rec(0, query, k, heap);
  std::sort(heap.begin(), heap.end());
  std::vector<int> out;
  out.reserve(heap.size());
  for (const auto& [d2, idx] : heap) out.push_back(idx);
  return out;
}

std::vector<std::vector<int>> Octree::leaf_index_sets() const {
  std::vector<std::vector<int>> sets;
  for (const Node& node : nodes_) {
    if (!node.leaf) continue;
    sets.emplace_back(ordered_.begin() + node.begin, ordered_.begin() + node.end);
  }
  return sets;
}

std::vector<int> LinearScanIndex::radius_search(const Vec3& query, double radius) const {
  if (radius <= 0.0) throw Error("radius must be > 0");
  const double r2 = radius * radius;
  std::vector<int> out;
  const auto& pts = cloud_->points;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if ((pts[i] - query).squaredNorm() <= r2) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> LinearScanIndex::knn_search(const Vec3& query, int k) const {
  if (k < 1) throw Error("knn k must be >= 1");
  std::vector<std::pair<double, int>> all;
  const auto& pts = cloud_->points;
  all.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    all.emplace_back((pts[i] - query).squaredNorm(), static_cast<int>(i));
  }
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk), all.end());
  std::vector<int> out;
  out.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) out.push_back(all[i].second);
  return out;
}

}  // namespace binpick

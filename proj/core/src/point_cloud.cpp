#include "binpick/point_cloud.hpp"

#include <cmath>

#include "binpick/errors.hpp"

namespace binpick {

void PointCloud::add(const Vec3& p) {
  if (!p.allFinite()) throw DegenerateInputError("non-finite point coordinate");
  points.push_back(p);
}

void PointCloud::add(const Vec3& p, int label) {
  add(p);
  labels.resize(points.size() - 1, -1);
  labels.push_back(label);
}

PointCloud PointCloud::select(std::span<const int> indices) const {
  PointCloud out;
  out.points.reserve(indices.size());
  for (int i : indices) out.points.push_back(points[static_cast<std::size_t>(i)]);
  if (has_normals()) {
    out.normals.reserve(indices.size());
    out.normal_valid.reserve(indices.size());
    for (int i : indices) {
      out.normals.push_back(normals[static_cast<std::size_t>(i)]);
      out.normal_valid.push_back(normal_valid[static_cast<std::size_t>(i)]);
    }
  }
  if (has_curvatures()) {
    out.curvatures.reserve(indices.size());
    for (int i : indices) out.curvatures.push_back(curvatures[static_cast<std::size_t>(i)]);
  }
  if (has_labels()) {
    out.labels.reserve(indices.size());
    for (int i : indices) out.labels.push_back(labels[static_cast<std::size_t>(i)]);
  }
  return out;
}

void PointCloud::check_consistent() const {
  const std::size_t n = points.size();
  if (has_normals() && (normals.size() != n || normal_valid.size() != n))
    throw Error("normal channel length mismatch");
  if (has_curvatures() && curvatures.size() != n)
    throw Error("curvature channel length mismatch");
  if (has_labels() && labels.size() != n) throw Error("label channel length mismatch");
}

Aabb PointCloud::bounds() const {
  if (empty()) throw EmptyInputError("bounds of empty cloud");
  Aabb box{points[0], points[0]};
  for (const Vec3& p : points) box.expand(p);
  return box;
}

Vec3 centroid(const PointCloud& cloud) {
  if (cloud.empty()) throw EmptyInputError("centroid of empty cloud");
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : cloud.points) sum += p;
  return sum / static_cast<double>(cloud.size());
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  PointCloud out;
  out.points.reserve(cloud.size());
  for (const Vec3& p : cloud.points) out.points.push_back(t(p));
  if (cloud.has_normals()) {
    out.normals.reserve(cloud.size());
    for (const Vec3& n : cloud.normals) out.normals.push_back(t.rotation * n);
    out.normal_valid = cloud.normal_valid;
  }
  out.curvatures = cloud.curvatures;
  out.labels = cloud.labels;
  return out;
}

}  // namespace binpick

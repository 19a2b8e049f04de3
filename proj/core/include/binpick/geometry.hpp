#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace binpick {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Axis-aligned bounding box, min <= max componentwise.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool valid() const { return (min.array() <= max.array()).all(); }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }

  void expand(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }

  /// Squared distance from p to the box, 0 when inside.
  double sq_distance(const Vec3& p) const {
    const Vec3 d = (min - p).cwiseMax(p - max).cwiseMax(0.0);
    return d.squaredNorm();
  }
};

/// Proper rigid motion: p -> R p + t with R orthonormal, det +1.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 operator()(const Vec3& p) const { return rotation * p + translation; }

  /// Composition: (a * b)(p) == a(b(p)).
  RigidTransform operator*(const RigidTransform& rhs) const {
    return {rotation * rhs.rotation, rotation * rhs.translation + translation};
  }

  RigidTransform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  bool is_rigid(double tol = 1e-9) const;

  Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(rotation); }

  static RigidTransform identity() { return {}; }

  static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                        const Vec3& t = Vec3::Zero()) {
    return {Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix(), t};
  }

  static RigidTransform from_quaternion(const Eigen::Quaterniond& q,
                                        const Vec3& t = Vec3::Zero()) {
    return {q.normalized().toRotationMatrix(), t};
  }
};

/// Rotation angle (radians) between two rotation matrices.
double rotation_distance(const Mat3& a, const Mat3& b);

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi rotations.
/// Eigenvalues ascending; eigenvectors are the matching columns of `vectors`,
/// orthonormal, each sign-fixed so its largest-magnitude component is positive.
struct SymEig3 {
  Vec3 values;
  Mat3 vectors;
};
SymEig3 symmetric_eigen3(const Mat3& m);

}  // namespace binpick

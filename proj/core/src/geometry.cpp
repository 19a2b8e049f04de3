#include "binpick/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace binpick {

bool RigidTransform::is_rigid(double tol) const {
  const Mat3 should_be_identity = rotation.transpose() * rotation;
  if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

double rotation_distance(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  const double c = std::clamp((rel.trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c);
}

namespace {

// One Jacobi rotation zeroing a(p,q); accumulates into v.
void jacobi_rotate(Mat3& a, Mat3& v, int p, int q) {
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const double app = a(p, p), aqq = a(q, q);
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = a(q, p) = 0.0;
  const int r = 3 - p - q;  // remaining index
  const double arp = a(r, p), arq = a(r, q);
  a(r, p) = a(p, r) = c * arp - s * arq;
  a(r, q) = a(q, r) = s * arp + c * arq;

  for (int i = 0; i < 3; ++i) {
    const double vip = v(i, p), viq = v(i, q);
    v(i, p) = c * vip - s * viq;
    v(i, q) = s * vip + c * viq;
  }
}

}  // namespace

SymEig3 symmetric_eigen3(const Mat3& m) {
  Mat3 a = 0.5 * (m + m.transpose());
  Mat3 v = Mat3::Identity();
  const double scale = a.cwiseAbs().maxCoeff();

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off =
        std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
    if (off <= 1e-15 * scale || off == 0.0) break;
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }

  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) < a(j, j); });

  SymEig3 out;
  for (int k = 0; k < 3; ++k) {
    out.values[k] = a(order[k], order[k]);
    Vec3 col = v.col(order[k]);
    int imax = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(col[i]) > std::abs(col[imax])) imax = i;
    }
    if (col[imax] < 0.0) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

}  // namespace binpick

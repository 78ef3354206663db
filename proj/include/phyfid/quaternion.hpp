#pragma once

#include <Eigen/Core>

namespace phyfid::qnn {

/// r + x i + y j + z k
struct Quaternion {
  double r = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const Quaternion&) const = default;
};

Quaternion hamilton_product(const Quaternion& q1, const Quaternion& q2);

/// Real 4x4 form acting on (r, x, y, z) columns so that
/// quaternion_matrix(q1) * vec(q2) == vec(q1 ⊗ q2):
///   [ r -x -y -z ]
///   [ x  r -z  y ]
///   [ y  z  r -x ]
///   [ z -y  x  r ]
Eigen::Matrix4d quaternion_matrix(const Quaternion& q);

Eigen::Vector4d to_vector(const Quaternion& q);
Quaternion from_vector(const Eigen::Vector4d& v);

double norm(const Quaternion& q);

}  // namespace phyfid::qnn

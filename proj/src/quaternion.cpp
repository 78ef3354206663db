#include "phyfid/quaternion.hpp"

#include <cmath>

namespace phyfid::qnn {

Quaternion hamilton_product(const Quaternion& a, const Quaternion& b) {
  return {
      a.r * b.r - a.x * b.x - a.y * b.y - a.z * b.z,
      a.r * b.x + a.x * b.r + a.y * b.z - a.z * b.y,
      a.r * b.y - a.x * b.z + a.y * b.r + a.z * b.x,
      a.r * b.z + a.x * b.y - a.y * b.x + a.z * b.r,
  };
}

Eigen::Matrix4d quaternion_matrix(const Quaternion& q) {
  Eigen::Matrix4d m;
  m << q.r, -q.x, -q.y, -q.z,
       q.x,  q.r, -q.z,  q.y,
       q.y,  q.z,  q.r, -q.x,
       q.z, -q.y,  q.x,  q.r;
  return m;
}

Eigen::Vector4d to_vector(const Quaternion& q) { return {q.r, q.x, q.y, q.z}; }

Quaternion from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

double norm(const Quaternion& q) {
  return std::sqrt(q.r * q.r + q.x * q.x + q.y * q.y + q.z * q.z);
}

}  // namespace phyfid::qnn

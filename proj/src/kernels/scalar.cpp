#include "phyfid/kernels.hpp"

namespace phyfid::kernels::scalar {
namespace {

double sum(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    acc[0] += x[i];
    acc[1] += x[i + 1];
    acc[2] += x[i + 2];
    acc[3] += x[i + 3];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = blocked; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) acc[l] += x[i + l] * y[i + l];
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = blocked; i < n; ++i) total += x[i] * y[i];
  return total;
}

double sum_sq_diff(const double* x, const double* y, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double d = x[i + l] - y[i + l];
      acc[l] += d * d;
    }
  }
  double total = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = blocked; i < n; ++i) {
    const double d = x[i] - y[i];
    total += d * d;
  }
  return total;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void half_diff(const double* hi, const double* lo, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (hi[i] - lo[i]);
}

}  // namespace

const Table table{Isa::scalar, sum, dot, sum_sq_diff, axpy, half_diff};

}  // namespace phyfid::kernels::scalar

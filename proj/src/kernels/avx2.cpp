// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include "phyfid/kernels.hpp"

namespace phyfid::kernels::avx2 {
namespace {

// (l0 + l1) + (l2 + l3), matching the scalar combine order.
inline double combine(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  double total = combine(acc);
  for (std::size_t i = blocked; i < n; ++i) total += x[i];
  return total;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, p);
  }
  double total = combine(acc);
  for (std::size_t i = blocked; i < n; ++i) total += x[i] * y[i];
  return total;
}

double sum_sq_diff(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t blocked = n - n % 4;
  for (std::size_t i = 0; i < blocked; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = combine(acc);
  for (std::size_t i = blocked; i < n; ++i) {
    const double d = x[i] - y[i];
    total += d * d;
  }
  return total;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void half_diff(const double* hi, const double* lo, double* out, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(hi + i), _mm256_loadu_pd(lo + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(half, d));
  }
  for (; i < n; ++i) out[i] = 0.5 * (hi[i] - lo[i]);
}

}  // namespace

const Table table{Isa::avx2, sum, dot, sum_sq_diff, axpy, half_diff};

}  // namespace phyfid::kernels::avx2

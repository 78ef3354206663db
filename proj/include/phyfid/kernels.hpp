#pragma once

// Data-parallel inner loops shared by the flow estimator, the differential
// operators and the metric reductions.
//
// Every reduction uses one fixed summation order: four interleaved partial
// sums (element i goes to lane i % 4 over the largest multiple-of-four
// prefix), combined as (l0 + l1) + (l2 + l3), then the tail added in order.
// The scalar path emulates that order, so all ISA paths return bit-identical
// results and reports do not depend on the machine's vector unit.

#include <cstddef>
#include <span>
#include <string_view>

namespace phyfid::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

struct Table {
  Isa isa;
  /// Sum of x.
  double (*sum)(const double* x, std::size_t n);
  /// Sum of x[i] * y[i].
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// Sum of (x[i] - y[i])^2.
  double (*sum_sq_diff)(const double* x, const double* y, std::size_t n);
  /// y[i] += a * x[i].
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// out[i] = 0.5 * (hi[i] - lo[i]).
  void (*half_diff)(const double* hi, const double* lo, double* out, std::size_t n);
};

namespace scalar {
extern const Table table;
}
#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
extern const Table table;
}
#endif
#if defined(__aarch64__)
namespace neon {
extern const Table table;
}
#endif

/// True when the running CPU can execute the given path.
bool supported(Isa isa) noexcept;

/// Table for a specific path, or nullptr if it is not compiled in or not
/// supported by the CPU.
const Table* table_for(Isa isa) noexcept;

/// Best supported path, unless PHYFID_ISA=scalar|avx2|neon overrides it.
Isa detect() noexcept;

/// Active table used by the library.
const Table& active() noexcept;

/// Switch the active path; throws ConfigError when unsupported.
void select(Isa isa);

// Span conveniences over the active table.

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }
inline double dot(std::span<const double> x, std::span<const double> y) {
  return active().dot(x.data(), y.data(), x.size());
}
inline double sum_sq_diff(std::span<const double> x, std::span<const double> y) {
  return active().sum_sq_diff(x.data(), y.data(), x.size());
}
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}
inline void half_diff(std::span<const double> hi, std::span<const double> lo,
                      std::span<double> out) {
  active().half_diff(hi.data(), lo.data(), out.data(), out.size());
}

}  // namespace phyfid::kernels

#include <atomic>
#include <cstdlib>
#include <string>

#include "phyfid/error.hpp"
#include "phyfid/kernels.hpp"

namespace phyfid::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const Table* table_for(Isa isa) noexcept {
  if (!supported(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar: return &scalar::table;
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return &avx2::table;
#endif
#if defined(__aarch64__)
    case Isa::neon: return &neon::table;
#endif
    default: return nullptr;
  }
}

Isa detect() noexcept {
  if (const char* env = std::getenv("PHYFID_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == to_string(isa) && supported(isa)) return isa;
    }
  }
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

namespace {

std::atomic<const Table*>& slot() {
  static std::atomic<const Table*> current{table_for(detect())};
  return current;
}

}  // namespace

const Table& active() noexcept { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) {
  const Table* t = table_for(isa);
  if (t == nullptr) {
    throw ConfigError("kernel path '" + std::string(to_string(isa)) +
                      "' is not supported on this CPU");
  }
  slot().store(t, std::memory_order_release);
}

}  // namespace phyfid::kernels

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "flocklab/simd/ops.hpp"

namespace flocklab::simd {

#if !FLOCKLAB_HAVE_AVX2_TU
const Ops& avx2_ops() {
  throw std::runtime_error("simd: avx2 backend not built on this platform");
}
#endif

bool avx2_supported() {
#if FLOCKLAB_HAVE_AVX2_TU && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

const Ops& pick_backend() {
  const char* env = std::getenv("FLOCKLAB_SIMD");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return scalar_ops();
  if (choice == "avx2") {
    if (!avx2_supported())
      throw std::runtime_error("simd: FLOCKLAB_SIMD=avx2 but host lacks avx2/fma");
    return avx2_ops();
  }
  if (choice != "auto" && !choice.empty())
    throw std::runtime_error("simd: unknown FLOCKLAB_SIMD value '" + choice +
                             "' (expected auto, scalar, or avx2)");
  return avx2_supported() ? avx2_ops() : scalar_ops();
}

}  // namespace

const Ops& active_ops() {
  static const Ops& ops = pick_backend();
  return ops;
}

const char* active_backend_name() { return active_ops().name; }

}  // namespace flocklab::simd

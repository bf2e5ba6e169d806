#include "ptreg/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ptreg::kernels {
namespace {

const Backend& pick() {
  const char* env = std::getenv("PTREG_KERNELS");
  const std::string mode = env ? env : "auto";
  if (mode == "scalar") return scalar_backend();
  const Backend* simd = avx2_backend();
  if (mode == "avx2") {
    if (!simd)
      throw std::runtime_error(
          "PTREG_KERNELS=avx2 but AVX2 kernels are unavailable on this CPU or "
          "build");
    return *simd;
  }
  if (mode != "auto")
    throw std::runtime_error("unknown PTREG_KERNELS value '" + mode +
                             "' (expected auto, scalar or avx2)");
  return simd ? *simd : scalar_backend();
}

}  // namespace

const Backend& active() {
  static const Backend& backend = pick();
  return backend;
}

}  // namespace ptreg::kernels

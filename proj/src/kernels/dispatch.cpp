#include <stdexcept>

#include "qclab/kernels.hpp"

namespace qclab::kernels {

#if defined(QCLAB_HAVE_AVX2_TU)
extern const KernelSet avx2_kernels;
#endif

bool avx2_compiled() {
#if defined(QCLAB_HAVE_AVX2_TU)
  return true;
#else
  return false;
#endif
}

bool avx2_available() {
#if defined(QCLAB_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Kind parse_kind(const std::string& name) {
  if (name == "auto") return Kind::Auto;
  if (name == "scalar") return Kind::Scalar;
  if (name == "avx2") return Kind::Avx2;
  throw std::invalid_argument("unknown kernel kind: " + name);
}

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Auto:
      return "auto";
    case Kind::Scalar:
      return "scalar";
    case Kind::Avx2:
      return "avx2";
  }
  return "?";
}

const KernelSet& select(Kind kind) {
#if defined(QCLAB_HAVE_AVX2_TU)
  if (kind == Kind::Avx2 || (kind == Kind::Auto && avx2_available())) {
    if (!avx2_available()) {
      throw std::runtime_error("avx2 kernels requested but not supported");
    }
    return avx2_kernels;
  }
#else
  if (kind == Kind::Avx2) {
    throw std::runtime_error("avx2 kernels not compiled in");
  }
#endif
  return scalar_kernels;
}

}  // namespace qclab::kernels

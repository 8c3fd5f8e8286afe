#include <string>

#include "cbm/errors.hpp"
#include "cbm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#endif

namespace cbm::kern {

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
  unsigned eax, ebx, ecx, edx;
  if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
  const bool fma = ecx & (1u << 12);
  if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
  const bool avx2 = ebx & (1u << 5);
  return fma && avx2;
#else
  return false;
#endif
}

SweepFn g_kernel = nullptr;
const char* g_name = "";

void pick(const std::string& name) {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(CBM_HAVE_AVX2_BUILD)
  const bool avx2_ok = cpu_has_avx2_fma();
#else
  const bool avx2_ok = false;
#endif
  if (name == "auto") {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(CBM_HAVE_AVX2_BUILD)
    if (avx2_ok) {
      g_kernel = sweep_avx2;
      g_name = "avx2";
      return;
    }
#endif
    g_kernel = sweep_scalar;
    g_name = "scalar";
  } else if (name == "scalar") {
    g_kernel = sweep_scalar;
    g_name = "scalar";
  } else if (name == "avx2") {
#if (defined(__x86_64__) || defined(_M_X64)) && defined(CBM_HAVE_AVX2_BUILD)
    if (avx2_ok) {
      g_kernel = sweep_avx2;
      g_name = "avx2";
      return;
    }
#endif
    throw ValueError("sweep kernel 'avx2' not supported by this build/CPU");
  } else {
    throw ValueError("unknown sweep kernel '" + name + "'");
  }
}

}  // namespace

SweepFn active_sweep_kernel() {
  if (!g_kernel) pick("auto");
  return g_kernel;
}

const char* active_sweep_kernel_name() {
  if (!g_kernel) pick("auto");
  return g_name;
}

void force_sweep_kernel(const char* name) { pick(name); }

}  // namespace cbm::kern

#include <cmath>
#include <cstring>

#include "cbm/kernels.hpp"
#include "cbm/rng.hpp"

namespace cbm::kern {

// Cephes-style expf: n = round(x / ln 2) via the 2^23 shifter trick, two-step
// Cody-Waite reduction, degree-5 polynomial, exponent reassembly.  Every
// operation here has a lane-for-lane AVX2 twin in kernels_avx2.cpp; keep the
// two in sync or bit-reproducibility across CPUs is lost.
float exp_poly(float x) {
  x = std::fmin(std::fmax(x, -87.0f), 87.0f);
  const float shifter = 12582912.0f;  // 2^23 + 2^22
  float z = std::fmaf(x, 1.44269504f, shifter);
  float n = z - shifter;
  float r = std::fmaf(n, -0.693359375f, x);
  r = std::fmaf(n, 2.12194440e-4f, r);
  float p = 1.9875691500e-4f;
  p = std::fmaf(p, r, 1.3981999507e-3f);
  p = std::fmaf(p, r, 8.3334519073e-3f);
  p = std::fmaf(p, r, 4.1665795894e-2f);
  p = std::fmaf(p, r, 1.6666665459e-1f);
  p = std::fmaf(p, r, 5.0000001201e-1f);
  float y = std::fmaf(p, r * r, r) + 1.0f;
  int32_t ni = int32_t(n);
  int32_t bits;
  float scale;
  bits = (ni + 127) << 23;
  std::memcpy(&scale, &bits, 4);
  return y * scale;
}

LaneState make_lane_state(const Plan& plan, uint64_t master_seed, uint64_t stream_tag) {
  LaneState st;
  st.q.assign(size_t(plan.n_sites) * lanes, 0.0f);
  st.rng.assign(4 * lanes, 0);
  for (int l = 0; l < lanes; ++l) {
    auto x = Xoshiro128pp::from_seed(
        derive_seed(master_seed, {0x636861696eull /* "chain" */, stream_tag, uint64_t(l)}));
    for (int s = 0; s < plan.n_sites; ++s)
      st.q[size_t(s) * lanes + l] = x.uniform() < 0.5f ? 1.0f : 0.0f;
    for (int k = 0; k < 4; ++k) st.rng[k * lanes + l] = x.s[k];
  }
  return st;
}

void sweep_scalar(const Plan& plan, int sweeps, LaneState& st) {
  float* q = st.q.data();
  uint32_t* S = st.rng.data();
  const float* bias = plan.bias.data();
  const int* indptr = plan.indptr.data();
  const int* nbr = plan.nbr.data();
  const float* w = plan.w.data();

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int oi = 0; oi < plan.n_sites; ++oi) {
      const int i = plan.order[oi];
      float* qi = q + size_t(i) * lanes;
      for (int l = 0; l < lanes; ++l) {
        float acc = bias[i];
        for (int k = indptr[i]; k < indptr[i + 1]; ++k)
          acc = std::fmaf(w[k], q[size_t(nbr[k]) * lanes + l], acc);
        const float p1 = 1.0f / (1.0f + exp_poly(acc));

        uint32_t s0 = S[0 * lanes + l], s1 = S[1 * lanes + l];
        uint32_t s2 = S[2 * lanes + l], s3 = S[3 * lanes + l];
        const uint32_t res = Xoshiro128pp::rotl(s0 + s3, 7) + s0;
        const uint32_t t = s1 << 9;
        s2 ^= s0;
        s3 ^= s1;
        s1 ^= s2;
        s0 ^= s3;
        s2 ^= t;
        s3 = Xoshiro128pp::rotl(s3, 11);
        S[0 * lanes + l] = s0;
        S[1 * lanes + l] = s1;
        S[2 * lanes + l] = s2;
        S[3 * lanes + l] = s3;

        const float u = float(res >> 8) * 0x1.0p-24f;
        qi[l] = u < p1 ? 1.0f : 0.0f;
      }
    }
  }
}

}  // namespace cbm::kern

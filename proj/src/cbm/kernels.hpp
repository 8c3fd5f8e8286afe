#pragma once
#include <cstdint>
#include <vector>

namespace cbm::kern {

// Lane-parallel Gibbs sweep kernel.  Eight independent chains occupy the
// eight float lanes of a 256-bit vector; chain state is stored site-major
// (q[site * lanes + lane]) so a site's eight lanes load as one vector.
//
// The scalar fallback executes the exact same per-lane arithmetic: the same
// fmaf ladder for the neighbor sum, the same polynomial exp, IEEE division,
// and the same xoshiro128++ integer updates.  Both paths therefore produce
// bit-identical chains, and every downstream artifact is reproducible no
// matter which kernel the runtime dispatch picks.

inline constexpr int lanes = 8;

// Problem view compacted over active sites, with beta folded into the
// coefficients.  For site i the conditional energy delta of setting q_i = 1
// given its neighbors is acc = bias[i] + sum_j w[k] * q[nbr[k]], and the
// update draws q_i = 1 with probability 1 / (1 + exp(acc)).
struct Plan {
  int n_sites = 0;
  std::vector<float> bias;    // beta * a_i per compacted site
  std::vector<int> indptr;    // CSR into nbr/w, size n_sites + 1
  std::vector<int> nbr;       // compacted neighbor index
  std::vector<float> w;       // beta * b_ij, parallel to nbr
  std::vector<int> order;     // scan order over compacted sites
};

struct LaneState {
  std::vector<float> q;       // n_sites * lanes, values 0.0f / 1.0f
  std::vector<uint32_t> rng;  // xoshiro128++ states, rng[k * lanes + lane], k in 0..3
};

// Fresh state: per-lane streams derived from (master_seed, stream_tag, lane),
// sites initialized to independent fair coin flips from each lane's stream.
LaneState make_lane_state(const Plan& plan, uint64_t master_seed, uint64_t stream_tag);

using SweepFn = void (*)(const Plan&, int sweeps, LaneState&);

void sweep_scalar(const Plan& plan, int sweeps, LaneState& st);
#if defined(__x86_64__) || defined(_M_X64)
void sweep_avx2(const Plan& plan, int sweeps, LaneState& st);
#endif

// Best kernel supported by the running CPU (cached after first call).
SweepFn active_sweep_kernel();
const char* active_sweep_kernel_name();

// Force a specific kernel ("scalar" | "avx2" | "auto"); throws ValueError if
// the CPU lacks the requested one.  Intended for tests and benchmarking.
void force_sweep_kernel(const char* name);

// The polynomial exp both kernels share, scalar form.  Accurate to ~1e-7
// relative over the clamped input range [-87, 87].
float exp_poly(float x);

}  // namespace cbm::kern

#pragma once
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "cbm/ising.hpp"

namespace cbm {

// Fixed-temperature Gibbs sampler standing in for the annealer.  beta = 7 by
// default: the measured decoupled-qubit response is P(1) = 1/(1 + e^{7 b}),
// which pins the effective inverse temperature; positive bias suppresses 1.
struct SamplerConfig {
  double beta = 7.0;
  int sweeps_per_read = 20;
  int burn_in_sweeps = 100;
  uint64_t seed = 0;
  // Optional per-qubit Gaussian bias offset emulating hardware non-uniformity
  // (seeded, fixed per topology).  0 = off; off for every acceptance check.
  double noise_std = 0.0;
  uint64_t noise_seed = 0x6e6f697365ull;  // "noise"
  // Per-sweep random site order instead of the fixed canonical scan.
  bool random_scan = false;

  void validate() const;
};

// Per-qubit bias offsets for the configured noise model (all zeros when off).
std::vector<double> noise_offsets(const Topology& topo, const SamplerConfig& cfg);

// Draws num_reads assignments approximately Boltzmann-distributed at
// cfg.beta.  Eight independent chains run lane-parallel; chain c's stream is
// derived from (cfg.seed, c), reads are emitted chain-major, and the result
// is bit-identical regardless of which sweep kernel executes the chains.
SampleSet gibbs_sample(const Problem& p, int num_reads, const SamplerConfig& cfg);

// Per-site empirical P(1) over num_reads reads without materializing the
// assignments (same chains and reads as gibbs_sample).
std::vector<double> gibbs_marginals(const Problem& p, int num_reads,
                                    const SamplerConfig& cfg);

// Joint counts over disjoint qubit pairs, accumulated read-by-read:
// counts[k] = {n11, n10, n01, n00} for pairs[k].
std::vector<std::array<uint64_t, 4>> gibbs_joint_counts(
    const Problem& p, int num_reads, const SamplerConfig& cfg,
    const std::vector<std::pair<int, int>>& pairs);

}  // namespace cbm

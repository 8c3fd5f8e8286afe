#pragma once
#include <cstdint>
#include <vector>

#include "cbm/gibbs.hpp"
#include "cbm/ising.hpp"

namespace cbm {

// Exactly enumerated Boltzmann distribution over the active qubits of a
// problem (oracle backend; capacity bound 20 qubits).  State index is the
// bitmask over active ranks: bit r set means active qubit of rank r is 1.
class ExactDist {
 public:
  // Honors cfg.beta and the optional noise offsets (so the oracle matches
  // whatever problem the Gibbs backend actually samples).
  static ExactDist compute(const Problem& p, const SamplerConfig& cfg);

  int num_active() const { return n_; }
  const std::vector<double>& probabilities() const { return prob_; }

  // Per-site marginal P(1) (inactive sites 0).
  std::vector<double> marginals() const;

  // Exact joint of an ordered pair of active qubit indices.
  PairStats pair_stats(int qa, int qb) const;

  // i.i.d. categorical draws from the enumerated distribution.
  SampleSet sample(int num_reads, uint64_t seed) const;

 private:
  const Problem* p_ = nullptr;
  int n_ = 0;
  std::vector<double> prob_;  // size 2^n, sums to 1
};

// Convenience wrappers matching the Gibbs entry points.
SampleSet exact_sample(const Problem& p, int num_reads, const SamplerConfig& cfg);
std::vector<double> exact_marginals(const Problem& p, const SamplerConfig& cfg);

}  // namespace cbm

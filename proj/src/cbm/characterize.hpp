#pragma once
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cbm/gibbs.hpp"
#include "cbm/ising.hpp"

namespace cbm {

enum class Backend { gibbs, exact };

Backend backend_from_name(const std::string& name);
const char* backend_name(Backend b);

// log odds-ratio of a pair's joint distribution; zero iff the joint
// factorizes.  Throws ValueError when any cell is zero (callers report such
// points as saturated instead of emitting infinities).
double coupling_metric(const PairStats& st);

struct QubitSweepRow {
  double coefficient = 0, mean_p1 = 0, std_p1 = 0;
};

struct QubitSweepResult {
  std::vector<QubitSweepRow> rows;
  double fitted_steepness = 0;  // k of the least-squares fit to 1/(1+e^{k b})
  double max_abs_dev = 0;       // worst |measured - fitted model| over the sweep
};

// Decoupled-qubit response sweep: per step, every active qubit's linear
// coefficient is set to the common value (couplers all zero), the backend is
// sampled, and the mean/std of empirical P(1) across qubits is recorded.
// The exact backend reports enumerated marginals (no read noise).
QubitSweepResult characterize_qubits(std::shared_ptr<const Topology> topo,
                                     Backend backend, const SamplerConfig& cfg,
                                     double step = 1.0 / 64, int reads = 10000);

struct CouplingSweepRow {
  double c = 0, p11 = 0, p10 = 0, p01 = 0, p00 = 0;
  double metric = 0;
  bool saturated = false;
};

struct CouplingSweepResult {
  std::vector<CouplingSweepRow> rows;
  std::vector<std::pair<int, int>> pairs;
};

// Maximal set of couplers sharing no qubit, chosen greedily in canonical
// coupler order (the emulator's analog of the hardware's tested pair set).
std::vector<std::pair<int, int>> maximal_disjoint_couplers(const Topology& topo);

// Pair-coupling sweep: per step, only the pair couplings are programmed (all
// linear coefficients zero), joint statistics are aggregated over all pairs,
// and the log odds-ratio metric is computed from the aggregate.  Pairs must
// be disjoint couplers.  Empty pair list selects the maximal disjoint set.
// The exact backend uses enumerated pair joints on a single decoupled pair
// (noise-free closed form; identical for every disjoint pair).
CouplingSweepResult characterize_coupling(std::shared_ptr<const Topology> topo,
                                          Backend backend, const SamplerConfig& cfg,
                                          double step = 1.0 / 16, int reads = 10000,
                                          std::vector<std::pair<int, int>> pairs = {});

// Least-squares fit of measured (b, p) points to p = 1/(1 + e^{k b}),
// minimized over k by golden-section search on [0.5, 30].
double fit_sigmoid_steepness(const std::vector<QubitSweepRow>& rows);

}  // namespace cbm

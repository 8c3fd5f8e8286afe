#pragma once
#include <cstdint>
#include <memory>
#include <vector>

#include "cbm/chimera.hpp"

namespace cbm {

// One returned configuration: value in {0,1} per site (inactive sites 0).
using Assignment = std::vector<uint8_t>;

// Objective coefficients over a topology:
//
//   E(q) = sum_i a_i q_i + sum_{i<j} b_ij q_i q_j,   q_i in {0,1}
//
// All coefficients must lie in [-1,1] (the programmable range); out-of-range
// values are rejected at set time, never clamped silently, because silent
// clamping would mask trainer bugs.  Absent entries mean 0.
class Problem {
 public:
  explicit Problem(std::shared_ptr<const Topology> topo);

  void set_linear(int q, double a);
  void set_quadratic(int a, int b, double v);  // {a,b} must be an active coupler

  double linear(int q) const { return linear_[q]; }
  const std::vector<double>& linear_terms() const { return linear_; }
  // Indexed like topo().couplers().
  const std::vector<double>& quadratic_terms() const { return quadratic_; }

  const Topology& topo() const { return *topo_; }
  const std::shared_ptr<const Topology>& topo_ptr() const { return topo_; }

  // Exact energy; assignment must cover all sites (inactive entries ignored).
  double energy(const Assignment& a) const;

 private:
  std::shared_ptr<const Topology> topo_;
  std::vector<double> linear_;
  std::vector<double> quadratic_;
};

struct SampleSet {
  int num_reads = 0;
  std::vector<Assignment> assignments;
  std::vector<double> energies;  // parallel to assignments, recomputed exactly

  // Per-site fraction of reads at 1 (inactive sites come out 0).
  // Throws ValueError on an empty set.
  std::vector<double> expected_values() const;
};

// Joint distribution of an ordered qubit pair; Q[T][S] = P(first = T, second = S).
struct PairStats {
  double p11 = 0, p10 = 0, p01 = 0, p00 = 0;
};

struct GroundStates {
  double energy = 0;
  std::vector<Assignment> states;  // every minimizer
};

// Exhaustive minimum over all 2^n assignments of the active qubits.
// Throws CapacityError above 24 active qubits.
GroundStates ground_states(const Problem& p);

}  // namespace cbm

#include "cbm/ising.hpp"

#include <cmath>
#include <string>

#include "cbm/errors.hpp"

namespace cbm {

Problem::Problem(std::shared_ptr<const Topology> topo) : topo_(std::move(topo)) {
  if (!topo_) throw ValueError("problem: null topology");
  linear_.assign(topo_->num_sites(), 0.0);
  quadratic_.assign(topo_->couplers().size(), 0.0);
}

void Problem::set_linear(int q, double a) {
  if (!topo_->is_active(q))
    throw ValueError("set_linear: qubit " + std::to_string(q) + " is not active");
  if (!(a >= -1.0 && a <= 1.0))
    throw ValueError("set_linear: coefficient " + std::to_string(a) + " outside [-1,1]");
  linear_[q] = a;
}

void Problem::set_quadratic(int a, int b, double v) {
  const int ci = topo_->find_coupler(a, b);
  if (ci < 0)
    throw ValueError("set_quadratic: {" + std::to_string(a) + "," + std::to_string(b) +
                     "} is not an active coupler");
  if (!(v >= -1.0 && v <= 1.0))
    throw ValueError("set_quadratic: coefficient " + std::to_string(v) + " outside [-1,1]");
  quadratic_[ci] = v;
}

double Problem::energy(const Assignment& a) const {
  if (int(a.size()) != topo_->num_sites())
    throw ValueError("energy: assignment size mismatch");
  double e = 0.0;
  for (int q : topo_->active_sites()) {
    if (a[q] > 1) throw ValueError("energy: assignment values must be 0 or 1");
    if (a[q]) e += linear_[q];
  }
  const auto& cs = topo_->couplers();
  for (size_t i = 0; i < cs.size(); ++i)
    if (a[cs[i].a] && a[cs[i].b]) e += quadratic_[i];
  return e;
}

std::vector<double> SampleSet::expected_values() const {
  if (assignments.empty()) throw ValueError("expected_values: empty sample set");
  std::vector<double> p(assignments[0].size(), 0.0);
  for (const Assignment& a : assignments)
    for (size_t q = 0; q < a.size(); ++q)
      if (a[q]) p[q] += 1.0;
  for (double& v : p) v /= double(assignments.size());
  return p;
}

GroundStates ground_states(const Problem& p) {
  const Topology& topo = p.topo();
  const int n = topo.num_active();
  if (n > 24)
    throw CapacityError("ground_states: " + std::to_string(n) +
                        " active qubits exceeds the 24-qubit enumeration bound");
  const auto& act = topo.active_sites();

  // Compacted adjacency over active ranks for O(deg) flip deltas.
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  const auto& cs = topo.couplers();
  const auto& qw = p.quadratic_terms();
  for (size_t i = 0; i < cs.size(); ++i) {
    const int ra = topo.active_rank(cs[i].a), rb = topo.active_rank(cs[i].b);
    adj[ra].push_back({rb, qw[i]});
    adj[rb].push_back({ra, qw[i]});
  }
  std::vector<double> lin(n);
  for (int r = 0; r < n; ++r) lin[r] = p.linear(act[r]);

  // Gray-code walk: state x differs from its predecessor in exactly one bit.
  const uint64_t total = 1ull << n;
  double e = 0.0;  // energy of the all-zero state
  uint64_t state = 0;
  double best = 0.0;
  std::vector<uint64_t> best_states{0};
  for (uint64_t i = 1; i < total; ++i) {
    const int bit = __builtin_ctzll(i);  // bit flipped between gray(i-1) and gray(i)
    double delta = lin[bit];
    for (auto [j, w] : adj[bit])
      if (state >> j & 1) delta += w;
    if (state >> bit & 1)
      e -= delta;
    else
      e += delta;
    state ^= 1ull << bit;
    if (e < best - 1e-12) {
      best = e;
      best_states.assign(1, state);
    } else if (std::abs(e - best) <= 1e-12) {
      best_states.push_back(state);
    }
  }

  GroundStates out;
  out.energy = best;
  out.states.reserve(best_states.size());
  for (uint64_t s : best_states) {
    Assignment a(topo.num_sites(), 0);
    for (int r = 0; r < n; ++r)
      if (s >> r & 1) a[act[r]] = 1;
    out.states.push_back(std::move(a));
  }
  return out;
}

}  // namespace cbm

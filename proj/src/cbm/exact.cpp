#include "cbm/exact.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbm/errors.hpp"
#include "cbm/rng.hpp"

namespace cbm {

ExactDist ExactDist::compute(const Problem& p, const SamplerConfig& cfg) {
  cfg.validate();
  const Topology& topo = p.topo();
  const int n = topo.num_active();
  if (n > 20)
    throw CapacityError("exact backend: " + std::to_string(n) +
                        " active qubits exceeds the 20-qubit enumeration bound");
  const auto& act = topo.active_sites();
  const auto offsets = noise_offsets(topo, cfg);

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  const auto& cs = topo.couplers();
  const auto& qw = p.quadratic_terms();
  for (size_t i = 0; i < cs.size(); ++i) {
    const int ra = topo.active_rank(cs[i].a), rb = topo.active_rank(cs[i].b);
    adj[ra].push_back({rb, qw[i]});
    adj[rb].push_back({ra, qw[i]});
  }
  std::vector<double> lin(n);
  for (int r = 0; r < n; ++r) lin[r] = p.linear(act[r]) + offsets[act[r]];

  // Gray-code enumeration with O(deg) incremental energy updates.
  const uint64_t total = 1ull << n;
  std::vector<double> energy(total);
  energy[0] = 0.0;
  double e = 0.0;
  uint64_t state = 0;
  for (uint64_t i = 1; i < total; ++i) {
    const int bit = __builtin_ctzll(i);
    double delta = lin[bit];
    for (auto [j, w] : adj[bit])
      if (state >> j & 1) delta += w;
    if (state >> bit & 1)
      e -= delta;
    else
      e += delta;
    state ^= 1ull << bit;
    energy[state] = e;
  }

  const double emin = *std::min_element(energy.begin(), energy.end());
  ExactDist d;
  d.p_ = &p;
  d.n_ = n;
  d.prob_.resize(total);
  double z = 0.0;
  for (uint64_t s = 0; s < total; ++s) {
    d.prob_[s] = std::exp(-cfg.beta * (energy[s] - emin));
    z += d.prob_[s];
  }
  for (double& v : d.prob_) v /= z;
  return d;
}

std::vector<double> ExactDist::marginals() const {
  const Topology& topo = p_->topo();
  const auto& act = topo.active_sites();
  std::vector<double> m_rank(n_, 0.0);
  const uint64_t total = 1ull << n_;
  for (uint64_t s = 0; s < total; ++s) {
    const double pr = prob_[s];
    uint64_t bits = s;
    while (bits) {
      m_rank[__builtin_ctzll(bits)] += pr;
      bits &= bits - 1;
    }
  }
  std::vector<double> m(topo.num_sites(), 0.0);
  for (int r = 0; r < n_; ++r) m[act[r]] = m_rank[r];
  return m;
}

PairStats ExactDist::pair_stats(int qa, int qb) const {
  const Topology& topo = p_->topo();
  const int ra = topo.active_rank(qa), rb = topo.active_rank(qb);
  if (ra < 0 || rb < 0) throw ValueError("pair_stats: qubit not active");
  PairStats st;
  const uint64_t total = 1ull << n_;
  for (uint64_t s = 0; s < total; ++s) {
    const bool va = s >> ra & 1, vb = s >> rb & 1;
    if (va && vb)
      st.p11 += prob_[s];
    else if (va)
      st.p10 += prob_[s];
    else if (vb)
      st.p01 += prob_[s];
    else
      st.p00 += prob_[s];
  }
  return st;
}

SampleSet ExactDist::sample(int num_reads, uint64_t seed) const {
  if (num_reads < 1) throw ValueError("sampler: num_reads must be >= 1");
  const Topology& topo = p_->topo();
  const auto& act = topo.active_sites();
  std::vector<double> cdf(prob_.size());
  double acc = 0.0;
  for (size_t s = 0; s < prob_.size(); ++s) {
    acc += prob_[s];
    cdf[s] = acc;
  }
  cdf.back() = 1.0;

  Xoshiro128pp rng = Xoshiro128pp::from_seed(derive_seed(seed, {0x6578616374ull}));
  SampleSet out;
  out.num_reads = num_reads;
  out.assignments.reserve(num_reads);
  out.energies.reserve(num_reads);
  for (int r = 0; r < num_reads; ++r) {
    const double u = rng.uniform64();
    const uint64_t s =
        uint64_t(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    Assignment a(topo.num_sites(), 0);
    for (int k = 0; k < n_; ++k)
      if (s >> k & 1) a[act[k]] = 1;
    out.energies.push_back(p_->energy(a));
    out.assignments.push_back(std::move(a));
  }
  return out;
}

SampleSet exact_sample(const Problem& p, int num_reads, const SamplerConfig& cfg) {
  return ExactDist::compute(p, cfg).sample(num_reads, cfg.seed);
}

std::vector<double> exact_marginals(const Problem& p, const SamplerConfig& cfg) {
  return ExactDist::compute(p, cfg).marginals();
}

}  // namespace cbm

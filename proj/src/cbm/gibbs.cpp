#include "cbm/gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "cbm/errors.hpp"
#include "cbm/kernels.hpp"
#include "cbm/rng.hpp"

namespace cbm {

void SamplerConfig::validate() const {
  if (!(beta > 0)) throw ValueError("sampler: beta must be > 0");
  if (sweeps_per_read < 1) throw ValueError("sampler: sweeps_per_read must be >= 1");
  if (burn_in_sweeps < 0) throw ValueError("sampler: burn_in_sweeps must be >= 0");
  if (noise_std < 0) throw ValueError("sampler: noise_std must be >= 0");
}

std::vector<double> noise_offsets(const Topology& topo, const SamplerConfig& cfg) {
  std::vector<double> off(topo.num_sites(), 0.0);
  if (cfg.noise_std > 0) {
    // one draw per site index, so the offset of a given qubit does not
    // depend on which other qubits are masked
    for (int q : topo.active_sites()) {
      SplitMix64 sm(derive_seed(cfg.noise_seed, {uint64_t(q)}));
      off[q] = cfg.noise_std * gaussian(sm);
    }
  }
  return off;
}

namespace {

kern::Plan build_plan(const Problem& p, const SamplerConfig& cfg) {
  const Topology& topo = p.topo();
  const auto& act = topo.active_sites();
  const int n = int(act.size());
  const auto offsets = noise_offsets(topo, cfg);

  kern::Plan plan;
  plan.n_sites = n;
  plan.bias.resize(n);
  plan.indptr.assign(n + 1, 0);
  plan.order.resize(n);
  const auto& indptr = topo.indptr();
  const auto& adj_site = topo.adjacent_site();
  const auto& adj_coupler = topo.adjacent_coupler();
  const auto& qw = p.quadratic_terms();
  for (int r = 0; r < n; ++r) {
    const int q = act[r];
    plan.order[r] = r;
    plan.bias[r] = float(cfg.beta * (p.linear(q) + offsets[q]));
    plan.indptr[r + 1] = plan.indptr[r] + (indptr[q + 1] - indptr[q]);
    for (int k = indptr[q]; k < indptr[q + 1]; ++k) {
      plan.nbr.push_back(topo.active_rank(adj_site[k]));
      plan.w.push_back(float(cfg.beta * qw[adj_coupler[k]]));
    }
  }
  return plan;
}

// Runs the chains and hands each recorded read to visit(lane, q_strided)
// where site s of the read lives at q_strided[s * lanes + lane].  Reads are
// visited round by round; lane l records reads while round < quota[l].
template <class Visit>
void run_chains(const Problem& p, int num_reads, const SamplerConfig& cfg, Visit&& visit) {
  cfg.validate();
  if (num_reads < 1) throw ValueError("sampler: num_reads must be >= 1");

  kern::Plan plan = build_plan(p, cfg);
  kern::LaneState st = kern::make_lane_state(plan, cfg.seed, 0);
  kern::SweepFn sweep = kern::active_sweep_kernel();

  int quota[kern::lanes];
  const int base = num_reads / kern::lanes, rem = num_reads % kern::lanes;
  for (int l = 0; l < kern::lanes; ++l) quota[l] = base + (l < rem ? 1 : 0);
  const int rounds = quota[0];

  // Optional per-sweep random scan order (off by default: the fixed scan is
  // part of the reproducibility contract).
  Xoshiro128pp scan_rng = Xoshiro128pp::from_seed(derive_seed(cfg.seed, {0x7363616eull}));
  auto run_sweeps = [&](int count) {
    if (!cfg.random_scan) {
      sweep(plan, count, st);
      return;
    }
    for (int s = 0; s < count; ++s) {
      for (int i = plan.n_sites - 1; i > 0; --i) {
        const int j = int(scan_rng.next() % uint32_t(i + 1));
        std::swap(plan.order[i], plan.order[j]);
      }
      sweep(plan, 1, st);
    }
  };

  run_sweeps(cfg.burn_in_sweeps);
  for (int round = 0; round < rounds; ++round) {
    run_sweeps(cfg.sweeps_per_read);
    for (int l = 0; l < kern::lanes; ++l)
      if (round < quota[l]) visit(l, st.q.data());
  }
}

}  // namespace

SampleSet gibbs_sample(const Problem& p, int num_reads, const SamplerConfig& cfg) {
  const Topology& topo = p.topo();
  const auto& act = topo.active_sites();
  // collect per lane, then emit chain-major so the read order is defined
  std::vector<std::vector<Assignment>> per_lane(kern::lanes);
  run_chains(p, num_reads, cfg, [&](int lane, const float* q) {
    Assignment a(topo.num_sites(), 0);
    for (size_t r = 0; r < act.size(); ++r)
      a[act[r]] = q[r * kern::lanes + lane] != 0.0f ? 1 : 0;
    per_lane[lane].push_back(std::move(a));
  });

  SampleSet out;
  out.num_reads = num_reads;
  out.assignments.reserve(num_reads);
  for (auto& lane_reads : per_lane)
    for (auto& a : lane_reads) out.assignments.push_back(std::move(a));
  out.energies.reserve(num_reads);
  for (const Assignment& a : out.assignments) out.energies.push_back(p.energy(a));
  return out;
}

std::vector<double> gibbs_marginals(const Problem& p, int num_reads,
                                    const SamplerConfig& cfg) {
  const Topology& topo = p.topo();
  const auto& act = topo.active_sites();
  std::vector<uint64_t> counts(act.size(), 0);
  run_chains(p, num_reads, cfg, [&](int lane, const float* q) {
    for (size_t r = 0; r < act.size(); ++r)
      if (q[r * kern::lanes + lane] != 0.0f) ++counts[r];
  });
  std::vector<double> marg(topo.num_sites(), 0.0);
  for (size_t r = 0; r < act.size(); ++r)
    marg[act[r]] = double(counts[r]) / double(num_reads);
  return marg;
}

std::vector<std::array<uint64_t, 4>> gibbs_joint_counts(
    const Problem& p, int num_reads, const SamplerConfig& cfg,
    const std::vector<std::pair<int, int>>& pairs) {
  const Topology& topo = p.topo();
  std::vector<std::pair<int, int>> ranks;
  ranks.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (!topo.is_active(a) || !topo.is_active(b))
      throw ValueError("joint_counts: pair qubit not active");
    ranks.push_back({topo.active_rank(a), topo.active_rank(b)});
  }
  std::vector<std::array<uint64_t, 4>> counts(pairs.size(), {0, 0, 0, 0});
  run_chains(p, num_reads, cfg, [&](int lane, const float* q) {
    for (size_t k = 0; k < ranks.size(); ++k) {
      const bool va = q[size_t(ranks[k].first) * kern::lanes + lane] != 0.0f;
      const bool vb = q[size_t(ranks[k].second) * kern::lanes + lane] != 0.0f;
      // index: 0 = 11, 1 = 10, 2 = 01, 3 = 00
      ++counts[k][(va ? 0 : 2) + (vb ? 0 : 1)];
    }
  });
  return counts;
}

}  // namespace cbm

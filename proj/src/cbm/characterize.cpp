#include "cbm/characterize.hpp"

#include <algorithm>
#include <cmath>

#include "cbm/errors.hpp"
#include "cbm/exact.hpp"
#include "cbm/rng.hpp"

namespace cbm {

Backend backend_from_name(const std::string& name) {
  if (name == "gibbs") return Backend::gibbs;
  if (name == "exact") return Backend::exact;
  throw ValueError("unknown backend '" + name + "' (expected gibbs|exact)");
}

const char* backend_name(Backend b) {
  return b == Backend::gibbs ? "gibbs" : "exact";
}

double coupling_metric(const PairStats& st) {
  if (!(st.p11 > 0 && st.p10 > 0 && st.p01 > 0 && st.p00 > 0))
    throw ValueError("coupling_metric: zero cell, metric saturated");
  return std::log(st.p11 * st.p00 / (st.p01 * st.p10));
}

namespace {

std::vector<double> sweep_grid(double step) {
  if (!(step > 0 && step <= 2)) throw ValueError("sweep step must be in (0, 2]");
  std::vector<double> grid;
  const int n = int(std::llround(2.0 / step));
  for (int i = 0; i <= n; ++i) grid.push_back(-1.0 + step * i);
  if (grid.back() != 1.0) grid.back() = 1.0;
  return grid;
}

}  // namespace

QubitSweepResult characterize_qubits(std::shared_ptr<const Topology> topo,
                                     Backend backend, const SamplerConfig& cfg,
                                     double step, int reads) {
  QubitSweepResult out;
  const auto grid = sweep_grid(step);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double b = grid[i];
    Problem p(topo);
    for (int q : topo->active_sites()) p.set_linear(q, b);
    SamplerConfig scfg = cfg;
    scfg.seed = derive_seed(cfg.seed, {0x7177656570ull /* "qweep" */, uint64_t(i)});
    const std::vector<double> marg = backend == Backend::gibbs
                                         ? gibbs_marginals(p, reads, scfg)
                                         : exact_marginals(p, scfg);
    double mean = 0;
    for (int q : topo->active_sites()) mean += marg[q];
    mean /= topo->num_active();
    double var = 0;
    for (int q : topo->active_sites()) var += (marg[q] - mean) * (marg[q] - mean);
    var /= topo->num_active();
    out.rows.push_back({b, mean, std::sqrt(var)});
  }
  out.fitted_steepness = fit_sigmoid_steepness(out.rows);
  for (const auto& r : out.rows) {
    const double model = 1.0 / (1.0 + std::exp(out.fitted_steepness * r.coefficient));
    out.max_abs_dev = std::max(out.max_abs_dev, std::abs(r.mean_p1 - model));
  }
  return out;
}

std::vector<std::pair<int, int>> maximal_disjoint_couplers(const Topology& topo) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<uint8_t> used(topo.num_sites(), 0);
  for (const Coupler& c : topo.couplers()) {
    if (used[c.a] || used[c.b]) continue;
    used[c.a] = used[c.b] = 1;
    pairs.push_back({c.a, c.b});
  }
  return pairs;
}

CouplingSweepResult characterize_coupling(std::shared_ptr<const Topology> topo,
                                          Backend backend, const SamplerConfig& cfg,
                                          double step, int reads,
                                          std::vector<std::pair<int, int>> pairs) {
  if (pairs.empty()) pairs = maximal_disjoint_couplers(*topo);
  std::vector<uint8_t> used(topo->num_sites(), 0);
  for (auto [a, b] : pairs) {
    if (topo->find_coupler(a, b) < 0)
      throw ValueError("characterize_coupling: pair is not an active coupler");
    if (used[a] || used[b])
      throw ValueError("characterize_coupling: pairs share a qubit");
    used[a] = used[b] = 1;
  }

  CouplingSweepResult out;
  out.pairs = pairs;
  const auto grid = sweep_grid(step);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double c = grid[i];
    CouplingSweepRow row;
    row.c = c;
    if (backend == Backend::gibbs) {
      Problem p(topo);
      for (auto [a, b] : pairs) p.set_quadratic(a, b, c);
      SamplerConfig scfg = cfg;
      scfg.seed = derive_seed(cfg.seed, {0x6377656570ull /* "cweep" */, uint64_t(i)});
      const auto counts = gibbs_joint_counts(p, reads, scfg, pairs);
      uint64_t agg[4] = {0, 0, 0, 0};
      for (const auto& ct : counts)
        for (int k = 0; k < 4; ++k) agg[k] += ct[k];
      const double total = double(agg[0] + agg[1] + agg[2] + agg[3]);
      row.p11 = agg[0] / total;
      row.p10 = agg[1] / total;
      row.p01 = agg[2] / total;
      row.p00 = agg[3] / total;
    } else {
      // one decoupled pair enumerated exactly; every disjoint pair is
      // statistically identical, so the aggregate equals the single pair
      auto cell = std::make_shared<Topology>(Topology::build(1, 1));
      Problem p(cell);
      p.set_quadratic(0, 4, c);
      SamplerConfig scfg = cfg;
      const PairStats st = ExactDist::compute(p, scfg).pair_stats(0, 4);
      row.p11 = st.p11;
      row.p10 = st.p10;
      row.p01 = st.p01;
      row.p00 = st.p00;
    }
    PairStats st{row.p11, row.p10, row.p01, row.p00};
    try {
      row.metric = coupling_metric(st);
    } catch (const ValueError&) {
      row.saturated = true;
      row.metric = 0;
    }
    out.rows.push_back(row);
  }
  return out;
}

double fit_sigmoid_steepness(const std::vector<QubitSweepRow>& rows) {
  auto sse = [&](double k) {
    double s = 0;
    for (const auto& r : rows) {
      const double model = 1.0 / (1.0 + std::exp(k * r.coefficient));
      s += (r.mean_p1 - model) * (r.mean_p1 - model);
    }
    return s;
  };
  // golden-section search; sse is unimodal in k for sigmoid-shaped data
  const double phi = 0.6180339887498949;
  double lo = 0.5, hi = 30.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = sse(x1), f2 = sse(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = sse(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = sse(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cbm

#include "cbm/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "cbm/errors.hpp"
#include "cbm/exact.hpp"
#include "cbm/rng.hpp"

namespace cbm {

BiasNorm bias_norm_from_name(const std::string& name) {
  if (name == "layer_size") return BiasNorm::layer_size;
  if (name == "active_mass") return BiasNorm::active_mass;
  throw ValueError("unknown bias normalization '" + name +
                   "' (expected layer_size|active_mass)");
}

const char* bias_norm_name(BiasNorm n) {
  return n == BiasNorm::layer_size ? "layer_size" : "active_mass";
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0)) throw ValueError("train: learning_rate must be >= 0");
  if (phase12_iterations < 2) throw ValueError("train: phase12_iterations must be >= 2");
  if (reads_per_sample < 1) throw ValueError("train: reads_per_sample must be >= 1");
  if (passes < 0) throw ValueError("train: passes must be >= 0");
  if (!(weight_init_range >= 0 && weight_init_range <= 1))
    throw ValueError("train: weight_init_range must be in [0,1]");
  if (report_interval < 1) throw ValueError("train: report_interval must be >= 1");
}

int Network::add_visible_layer(const std::string& name, int size) {
  if (size < 1) throw ValueError("layer size must be >= 1");
  Layer l;
  l.name = name;
  l.kind = LayerKind::visible;
  l.size = size;
  l.e.assign(size, 0.0);
  l.f.assign(size, 0.0);
  l.bias.assign(size, 0.0);
  layers_.push_back(std::move(l));
  return int(layers_.size()) - 1;
}

int Network::add_hidden_layer(const std::string& name,
                              std::shared_ptr<const Topology> topo, Tiling tiling) {
  if (!topo) throw ValueError("hidden layer: null topology");
  if (tiling.rows < 1 || tiling.cols < 1)
    throw ValueError("hidden layer: tiling must have >= 1 tile");
  HiddenInfo hi;
  hi.topo = std::move(topo);
  hi.tiling = tiling;
  hi.active_per_tile = hi.topo->num_active();
  const int size = hi.active_per_tile * tiling.count();

  Layer l;
  l.name = name;
  l.kind = LayerKind::hidden;
  l.size = size;
  l.e.assign(size, 0.5);
  l.f.assign(size, 0.5);
  l.bias.assign(size, 0.0);
  layers_.push_back(std::move(l));
  hi.layer = int(layers_.size()) - 1;

  // Virtual couplers join boundary qubits that would be chimera inter-cell
  // neighbors if the tiles were physically adjacent: right edge (high side,
  // last cell column) to left edge of the next tile over, bottom edge (low
  // side, last cell row) to the top edge of the tile below.
  const Topology& t = *hi.topo;
  auto unit_of = [&](int tile, int site) {
    return tile * hi.active_per_tile + t.active_rank(site);
  };
  auto add_virtual = [&](int tile_a, int site_a, int tile_b, int site_b) {
    if (t.is_active(site_a) && t.is_active(site_b))
      hi.virtual_edges.push_back({unit_of(tile_a, site_a), unit_of(tile_b, site_b)});
  };
  for (int tr = 0; tr < tiling.rows; ++tr) {
    for (int tc = 0; tc < tiling.cols; ++tc) {
      const int tile = tr * tiling.cols + tc;
      if (tc + 1 < tiling.cols) {
        const int right = tile + 1;
        for (int r = 0; r < t.rows(); ++r)
          for (int k = 0; k < Topology::shore; ++k)
            add_virtual(tile,
                        t.index_of({r, t.cols() - 1, 1, k}),
                        right, t.index_of({r, 0, 1, k}));
      }
      if (tr + 1 < tiling.rows) {
        const int below = tile + tiling.cols;
        for (int c = 0; c < t.cols(); ++c)
          for (int k = 0; k < Topology::shore; ++k)
            add_virtual(tile,
                        t.index_of({t.rows() - 1, c, 0, k}),
                        below, t.index_of({0, c, 0, k}));
      }
    }
  }
  hi.virtual_w.assign(hi.virtual_edges.size(), 0.0);
  hi.intra_w.assign(size_t(tiling.count()) * t.couplers().size(), 0.0);

  // CSR over units into the virtual edge list
  hi.v_indptr.assign(size + 1, 0);
  for (const VirtualEdge& e : hi.virtual_edges) {
    ++hi.v_indptr[e.unit_a + 1];
    ++hi.v_indptr[e.unit_b + 1];
  }
  for (int u = 0; u < size; ++u) hi.v_indptr[u + 1] += hi.v_indptr[u];
  hi.v_edge.resize(hi.v_indptr[size]);
  std::vector<int> cursor(hi.v_indptr.begin(), hi.v_indptr.end() - 1);
  for (int ei = 0; ei < int(hi.virtual_edges.size()); ++ei) {
    const VirtualEdge& e = hi.virtual_edges[ei];
    hi.v_edge[cursor[e.unit_a]++] = ei;
    hi.v_edge[cursor[e.unit_b]++] = ei;
  }

  hidden_.push_back(std::move(hi));
  return hidden_.back().layer;
}

void Network::connect(int layer_a, int layer_b) {
  if (layer_a < 0 || layer_a >= num_layers() || layer_b < 0 || layer_b >= num_layers() ||
      layer_a == layer_b)
    throw ValueError("connect: bad layer pair");
  WeightGroup g;
  g.layer_a = layer_a;
  g.layer_b = layer_b;
  g.w.assign(size_t(layers_[layer_a].size) * layers_[layer_b].size, 0.0);
  groups_.push_back(std::move(g));
}

void Network::init_weights(uint64_t seed, double range) {
  auto fill = [&](std::vector<double>& w, uint64_t tag_a, uint64_t tag_b) {
    Xoshiro128pp rng = Xoshiro128pp::from_seed(derive_seed(seed, {0x77696e6974ull, tag_a, tag_b}));
    for (double& v : w) v = (rng.uniform64() * 2.0 - 1.0) * range;
  };
  for (size_t gi = 0; gi < groups_.size(); ++gi) fill(groups_[gi].w, 0, gi);
  for (size_t hi = 0; hi < hidden_.size(); ++hi) {
    fill(hidden_[hi].intra_w, 1, hi);
    fill(hidden_[hi].virtual_w, 2, hi);
  }
}

Network Network::digit_network(std::shared_ptr<const Topology> topo, Tiling tiling) {
  Network net;
  net.image_layer_ = net.add_visible_layer("image", 784);
  net.flag_layer_ = net.add_visible_layer("flags", 10);
  const int hidden = net.add_hidden_layer("hidden", std::move(topo), tiling);
  net.connect(net.image_layer_, hidden);
  net.connect(net.flag_layer_, hidden);
  return net;
}

double Network::sigmoid_response(double beta, double bias) {
  return 1.0 / (1.0 + std::exp(beta * bias));
}

const HiddenInfo* Network::hidden_info(int layer) const {
  for (const HiddenInfo& hi : hidden_)
    if (hi.layer == layer) return &hi;
  return nullptr;
}

HiddenInfo* Network::hidden_info(int layer) {
  return const_cast<HiddenInfo*>(std::as_const(*this).hidden_info(layer));
}

double Network::unit_bias(int layer, int unit, BiasNorm norm) const {
  const Layer& L = layers_[layer];
  if (unit < 0 || unit >= L.size) throw ValueError("unit_bias: unit out of range");

  double sum = 0.0;
  int n_contrib = 0;
  auto add_contribution = [&](double dot, double mass, int size) {
    const double den = norm == BiasNorm::layer_size ? double(size) : mass;
    sum += den > 1e-300 ? dot / den : 0.0;
    ++n_contrib;
  };

  for (const WeightGroup& g : groups_) {
    if (g.layer_a == layer) {
      const Layer& M = layers_[g.layer_b];
      double dot = 0.0, mass = 0.0;
      const double* wr = g.w.data() + size_t(unit) * M.size;
      for (int j = 0; j < M.size; ++j) {
        dot += wr[j] * M.e[j];
        mass += M.e[j];
      }
      add_contribution(dot, mass, M.size);
    } else if (g.layer_b == layer) {
      const Layer& M = layers_[g.layer_a];
      double dot = 0.0, mass = 0.0;
      for (int j = 0; j < M.size; ++j) {
        dot += g.w[size_t(j) * L.size + unit] * M.e[j];
        mass += M.e[j];
      }
      add_contribution(dot, mass, M.size);
    }
  }

  if (const HiddenInfo* hi = hidden_info(layer)) {
    const int begin = hi->v_indptr[unit], end = hi->v_indptr[unit + 1];
    // A virtual coupler at 0 is the same thing as no coupler, so an all-zero
    // edge set contributes nothing (and does not dilute the mean): tiles with
    // unprogrammed boundaries behave exactly like independent physical runs.
    bool programmed = false;
    for (int k = begin; k < end && !programmed; ++k)
      programmed = hi->virtual_w[hi->v_edge[k]] != 0.0;
    if (programmed) {
      double dot = 0.0, mass = 0.0;
      for (int k = begin; k < end; ++k) {
        const VirtualEdge& e = hi->virtual_edges[hi->v_edge[k]];
        const int other = e.unit_a == unit ? e.unit_b : e.unit_a;
        dot += hi->virtual_w[hi->v_edge[k]] * L.e[other];
        mass += L.e[other];
      }
      add_contribution(dot, mass, end - begin);
    }
  }

  if (n_contrib == 0)
    throw StateError("unit_bias: unit has no connected layers");
  return sum / n_contrib;
}

void Network::compute_phase1(int layer, BiasNorm norm) {
  Layer& L = layers_[layer];
  for (int u = 0; u < L.size; ++u) {
    const double b = unit_bias(layer, u, norm);
    if (!(b >= -1.0 && b <= 1.0))
      throw StateError("phase 1 produced a bias outside [-1,1]");
    L.bias[u] = b;
  }
}

void Network::phase2_visible(int layer, double beta) {
  Layer& L = layers_[layer];
  for (int u = 0; u < L.size; ++u) L.e[u] = sigmoid_response(beta, L.bias[u]);
}

void Network::phase2_hidden(int layer, Backend backend, const SamplerConfig& cfg,
                            int reads, uint64_t seed) {
  HiddenInfo* hi = hidden_info(layer);
  if (!hi) throw ValueError("phase2_hidden: not a hidden layer");
  Layer& L = layers_[layer];
  const Topology& t = *hi->topo;
  const auto& act = t.active_sites();
  const auto& cs = t.couplers();

  for (int tile = 0; tile < hi->tiling.count(); ++tile) {
    Problem p(hi->topo);
    const int base = tile * hi->active_per_tile;
    for (int r = 0; r < hi->active_per_tile; ++r) p.set_linear(act[r], L.bias[base + r]);
    const double* iw = hi->intra_w.data() + size_t(tile) * cs.size();
    for (size_t ci = 0; ci < cs.size(); ++ci) p.set_quadratic(cs[ci].a, cs[ci].b, iw[ci]);

    SamplerConfig scfg = cfg;
    scfg.seed = derive_seed(seed, {0x74696c65ull /* "tile" */, uint64_t(tile)});
    const std::vector<double> marg = backend == Backend::gibbs
                                         ? gibbs_marginals(p, reads, scfg)
                                         : exact_marginals(p, scfg);
    for (int r = 0; r < hi->active_per_tile; ++r) L.e[base + r] = marg[act[r]];
  }
}

void Network::snapshot_f() {
  for (Layer& l : layers_) l.f = l.e;
}

void Network::phase3_update(double k, bool train_intra) {
  auto clamp = [](double v) { return std::min(1.0, std::max(-1.0, v)); };
  for (WeightGroup& g : groups_) {
    const Layer& A = layers_[g.layer_a];
    const Layer& B = layers_[g.layer_b];
    for (int i = 0; i < A.size; ++i) {
      double* wr = g.w.data() + size_t(i) * B.size;
      for (int j = 0; j < B.size; ++j)
        wr[j] = clamp(wr[j] + k * (A.e[i] * B.e[j] - A.f[i] * B.f[j]));
    }
  }
  for (HiddenInfo& hi : hidden_) {
    const Layer& H = layers_[hi.layer];
    for (size_t ei = 0; ei < hi.virtual_edges.size(); ++ei) {
      const VirtualEdge& e = hi.virtual_edges[ei];
      hi.virtual_w[ei] = clamp(hi.virtual_w[ei] +
                               k * (H.e[e.unit_a] * H.e[e.unit_b] -
                                    H.f[e.unit_a] * H.f[e.unit_b]));
    }
    if (!train_intra) continue;
    const Topology& t = *hi.topo;
    const auto& cs = t.couplers();
    for (int tile = 0; tile < hi.tiling.count(); ++tile) {
      const int base = tile * hi.active_per_tile;
      double* iw = hi.intra_w.data() + size_t(tile) * cs.size();
      for (size_t ci = 0; ci < cs.size(); ++ci) {
        const int ua = base + t.active_rank(cs[ci].a);
        const int ub = base + t.active_rank(cs[ci].b);
        iw[ci] = clamp(iw[ci] + k * (H.e[ua] * H.e[ub] - H.f[ua] * H.f[ub]));
      }
    }
  }
}

void Network::seed_visible(const LabeledImage& img) {
  if (image_layer_ < 0 || flag_layer_ < 0)
    throw StateError("network has no image/flag layers");
  Layer& I = layers_[image_layer_];
  Layer& F = layers_[flag_layer_];
  if (I.size != 784 || F.size != 10)
    throw ValueError("network layers not sized for 784-pixel images and 10 flags");
  std::copy(img.pixels.begin(), img.pixels.end(), I.e.begin());
  std::copy(img.flags.begin(), img.flags.end(), F.e.begin());
}

void Network::train_cycle(const LabeledImage& img, Backend backend,
                          const SamplerConfig& scfg, const TrainConfig& cfg,
                          uint64_t cycle_seed) {
  cfg.validate();
  seed_visible(img);
  for (const HiddenInfo& hi : hidden_)
    std::fill(layers_[hi.layer].e.begin(), layers_[hi.layer].e.end(), 0.5);

  for (int it = 1; it <= cfg.phase12_iterations; ++it) {
    // All phase-1 biases come from the previous iteration's expectations
    // before any phase 2 runs (parallel-update contract).
    const bool visible_free = it > 1 && !cfg.clamp_visible;
    for (int li = 0; li < num_layers(); ++li) {
      if (layers_[li].kind == LayerKind::hidden || visible_free)
        compute_phase1(li, cfg.bias_normalization);
    }
    for (int li = 0; li < num_layers(); ++li) {
      if (layers_[li].kind == LayerKind::hidden)
        phase2_hidden(li, backend, scfg, cfg.reads_per_sample,
                      derive_seed(cycle_seed, {uint64_t(it), uint64_t(li)}));
      else if (visible_free)
        phase2_visible(li, scfg.beta);
    }
    if (it == 1) snapshot_f();
  }
  phase3_update(cfg.learning_rate, cfg.train_intra_couplers);
}

std::vector<int> Network::test_cycle(const LabeledImage& img, Backend backend,
                                     const SamplerConfig& scfg, const TrainConfig& cfg,
                                     uint64_t seed) {
  LabeledImage probe = img;
  probe.flags.fill(0.0);
  seed_visible(probe);
  for (const HiddenInfo& hi : hidden_)
    std::fill(layers_[hi.layer].e.begin(), layers_[hi.layer].e.end(), 0.5);

  for (const HiddenInfo& hi : hidden_) {
    compute_phase1(hi.layer, cfg.bias_normalization);
    phase2_hidden(hi.layer, backend, scfg, cfg.reads_per_sample,
                  derive_seed(seed, {0x74657374ull /* "test" */, uint64_t(hi.layer)}));
  }
  compute_phase1(flag_layer_, cfg.bias_normalization);
  phase2_visible(flag_layer_, scfg.beta);

  const Layer& F = layers_[flag_layer_];
  std::vector<int> order(F.size);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return F.e[a] > F.e[b]; });
  return order;
}

double Network::mean_abs_weight() const {
  double sum = 0;
  size_t n = 0;
  for (const WeightGroup& g : groups_) {
    for (double v : g.w) sum += std::abs(v);
    n += g.w.size();
  }
  for (const HiddenInfo& hi : hidden_) {
    for (double v : hi.intra_w) sum += std::abs(v);
    for (double v : hi.virtual_w) sum += std::abs(v);
    n += hi.intra_w.size() + hi.virtual_w.size();
  }
  return n ? sum / double(n) : 0.0;
}

Scores evaluate(Network& net, const std::vector<LabeledImage>& items, Backend backend,
                const SamplerConfig& scfg, const TrainConfig& cfg, uint64_t seed_base) {
  Scores s;
  for (size_t i = 0; i < items.size(); ++i) {
    const LabeledImage& im = items[i];
    if (im.is_noise || im.label < 0) continue;
    const auto order = net.test_cycle(im, backend, scfg, cfg, derive_seed(seed_base, {i}));
    ++s.counted;
    if (order[0] == im.label) s.top1 += 1;
    if (order[0] == im.label || order[1] == im.label) s.top2 += 1;
    if (order[0] == im.label || order[1] == im.label || order[2] == im.label) s.top3 += 1;
  }
  if (s.counted) {
    s.top1 /= s.counted;
    s.top2 /= s.counted;
    s.top3 /= s.counted;
  }
  return s;
}

}  // namespace cbm

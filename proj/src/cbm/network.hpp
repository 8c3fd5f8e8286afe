#pragma once
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cbm/characterize.hpp"
#include "cbm/chimera.hpp"
#include "cbm/gibbs.hpp"
#include "cbm/mnist.hpp"

namespace cbm {

// Per-layer normalization used when averaging weight*expectation products
// into a unit bias:
//   layer_size  — divide by the connected layer's unit count,
//   active_mass — divide by the sum of its expectations (a weighted average
//                 of the weights; 0 if the layer is all-zero).
// Both keep every bias in [-1,1] for in-range weights; active_mass preserves
// the drive of sparse layers (dark pixels stop diluting the average) and is
// the shipped default.
enum class BiasNorm { layer_size, active_mass };

BiasNorm bias_norm_from_name(const std::string& name);
const char* bias_norm_name(BiasNorm n);

struct TrainConfig {
  double learning_rate = 0.1;  // k of the weight update
  int phase12_iterations = 2;
  int reads_per_sample = 1000;
  int passes = 30;
  // Hold visible layers at their initialized data values for every phase-1/2
  // iteration (not just the first) when true.
  bool clamp_visible = false;
  double weight_init_range = 0.1;
  uint64_t seed = 42;
  BiasNorm bias_normalization = BiasNorm::active_mass;
  bool train_intra_couplers = true;
  bool shuffle_each_pass = true;
  int report_interval = 10;

  void validate() const;
};

// Tiles of one hidden layer arranged in a grid; tiles beyond the first are
// "virtual" copies of the physical topology, joined by virtual couplers
// along boundaries where adjacent tiles would be chimera neighbors.
struct Tiling {
  int rows = 1, cols = 1;
  int count() const { return rows * cols; }
};

struct VirtualEdge {
  int unit_a = 0, unit_b = 0;  // layer-local unit indices
};

enum class LayerKind : uint8_t { visible, hidden };

struct Layer {
  std::string name;
  LayerKind kind = LayerKind::visible;
  int size = 0;
  std::vector<double> e;     // current expected values, in [0,1]
  std::vector<double> f;     // snapshot after the first phase-1/2 iteration
  std::vector<double> bias;  // phase-1 result, in [-1,1]
};

// Dense bipartite weights between two layers; w[ua * size_b + ub], used
// symmetrically in both directions, clamped to [-1,1] after every update.
struct WeightGroup {
  int layer_a = 0, layer_b = 0;
  std::vector<double> w;
};

// Hidden-layer sampling structure: tiles over a chimera topology, per-tile
// intra couplings, and the virtual couplers between tiles.  Unit u of the
// layer is (tile, rank) = (u / active_per_tile, u % active_per_tile); rank
// indexes the topology's active qubit list.
struct HiddenInfo {
  int layer = -1;
  std::shared_ptr<const Topology> topo;
  Tiling tiling;
  int active_per_tile = 0;
  std::vector<double> intra_w;  // [tile * n_couplers + coupler]
  std::vector<VirtualEdge> virtual_edges;
  std::vector<double> virtual_w;  // parallel to virtual_edges
  // CSR over layer units into virtual_edges (each edge listed from both ends)
  std::vector<int> v_indptr, v_edge;
};

class Network {
 public:
  int add_visible_layer(const std::string& name, int size);
  int add_hidden_layer(const std::string& name, std::shared_ptr<const Topology> topo,
                       Tiling tiling);
  void connect(int layer_a, int layer_b);
  // Uniform random weights in [-range, range] for every trainable group
  // (inter-layer, intra-chimera, virtual), in a fixed derivation order.
  void init_weights(uint64_t seed, double range);

  // The digit-recognition network: image(784) + flags(10) visible layers,
  // one hidden layer over the given topology/tiling, fully connected to both.
  static Network digit_network(std::shared_ptr<const Topology> topo, Tiling tiling);

  int num_layers() const { return int(layers_.size()); }
  const Layer& layer(int i) const { return layers_[i]; }
  Layer& layer(int i) { return layers_[i]; }
  const std::vector<WeightGroup>& groups() const { return groups_; }
  std::vector<WeightGroup>& groups() { return groups_; }
  const std::vector<HiddenInfo>& hidden_infos() const { return hidden_; }
  std::vector<HiddenInfo>& hidden_infos() { return hidden_; }
  int image_layer() const { return image_layer_; }
  int flag_layer() const { return flag_layer_; }

  // Calibrated response: P(1) = 1 / (1 + e^{beta * bias}).
  static double sigmoid_response(double beta, double bias);

  // Phase 1 for one unit: mean over connected-layer contributions (including
  // the virtual-neighbor contribution for boundary units).  Throws StateError
  // for a unit with no connections at all.
  double unit_bias(int layer, int unit, BiasNorm norm) const;
  // Phase 1 for a whole layer, asserting every bias lands in [-1,1].
  void compute_phase1(int layer, BiasNorm norm);
  // Phase 2 for a visible layer: e = sigmoid_response(beta, bias).
  void phase2_visible(int layer, double beta);
  // Phase 2 for a hidden layer: per tile, an objective with linear terms =
  // unit biases and quadratic terms = the tile's intra couplings is sampled;
  // e = per-unit fraction of reads at 1 (exact marginals for the exact
  // backend).  Inter-layer weights never reach the sampler.
  void phase2_hidden(int layer, Backend backend, const SamplerConfig& cfg, int reads,
                     uint64_t seed);
  // Snapshot current e into f for every layer.
  void snapshot_f();
  // Phase 3: w += k (e_a e_b - f_a f_b), clamped to [-1,1], for inter-layer
  // weights, virtual couplers, and (optionally) intra-chimera couplings.
  void phase3_update(double k, bool train_intra);

  // One training cycle over an image (three-phase procedure, layers updated
  // as if in parallel).  Visible layers hold the data through the first
  // iteration — the f snapshot pairs the data with the hidden response to
  // it — and update freely afterwards unless cfg.clamp_visible keeps them
  // at the data for all iterations.
  void train_cycle(const LabeledImage& img, Backend backend, const SamplerConfig& scfg,
                   const TrainConfig& cfg, uint64_t cycle_seed);

  // Test cycle: image loaded, flags zeroed, hidden sampled once from the
  // image, flags read out; returns flag indices by descending expected value
  // (ties -> lowest index).
  std::vector<int> test_cycle(const LabeledImage& img, Backend backend,
                              const SamplerConfig& scfg, const TrainConfig& cfg,
                              uint64_t seed);

  // Mean |w| over all trainable weights (progress metric).
  double mean_abs_weight() const;

 private:
  void seed_visible(const LabeledImage& img);
  const HiddenInfo* hidden_info(int layer) const;
  HiddenInfo* hidden_info(int layer);

  std::vector<Layer> layers_;
  std::vector<WeightGroup> groups_;
  std::vector<HiddenInfo> hidden_;
  int image_layer_ = -1, flag_layer_ = -1;
};

struct Scores {
  double top1 = 0, top2 = 0, top3 = 0;
  int counted = 0;
};

// Top-1/2/3 recognition probability over the digit entries of a set (noise
// images are skipped).  Item i uses seed derive_seed(seed_base, {i}).
Scores evaluate(Network& net, const std::vector<LabeledImage>& items, Backend backend,
                const SamplerConfig& scfg, const TrainConfig& cfg, uint64_t seed_base);

}  // namespace cbm

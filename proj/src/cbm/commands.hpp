#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace cbm {

// Fully-resolved run configuration: compiled-in defaults, overlaid by a JSON
// config file, overlaid by command-line flags.  Every command writes the
// resolved form to <out>/config.json; re-running the same command with
// --config <out>/config.json reproduces every other output byte for byte.
struct RunConfig {
  std::string command;
  std::string out = "out";

  // topology
  int rows = 8, cols = 8;
  std::vector<int> inactive;

  // sampler
  std::string backend = "gibbs";
  std::string kernel = "auto";  // auto | scalar | avx2
  double beta = 7.0;
  int sweeps_per_read = 20;
  int burn_in_sweeps = 100;
  double noise_std = 0.0;
  uint64_t noise_seed = 0x6e6f697365ull;
  bool random_scan = false;
  uint64_t seed = 42;

  // characterization sweeps
  double qubit_step = 1.0 / 64;
  double coupling_step = 1.0 / 16;
  int reads = 10000;

  // data + training
  std::string images = "data/mnist/images-idx3-ubyte";
  std::string labels = "data/mnist/labels-idx1-ubyte";
  int variant = 50;
  uint64_t split_seed = 42;
  int tile_rows = 0, tile_cols = 0;  // 0 = auto: 1x2 for variant 200, else 1x1
  double learning_rate = 0.1;
  int phase12_iterations = 2;
  int reads_per_sample = 1000;
  int passes = 30;
  bool clamp_visible = false;
  double weight_init_range = 0.1;
  std::string bias_normalization = "active_mass";
  bool train_intra_couplers = true;
  bool shuffle_each_pass = true;
  int report_interval = 10;

  // test
  std::string checkpoint = "out/checkpoint.bin";
  std::string set = "test";  // train | test

  // sample
  std::string problem;
  int num_reads = 1000;
};

// Serialized resolved config (ordered keys, stable formatting).
std::string run_config_to_json(const RunConfig& rc);
// Overlay a JSON config file onto rc.  Unknown keys and type mismatches are
// ValueErrors; a "command" entry that contradicts rc.command is too.
void apply_config_json(RunConfig& rc, const std::string& json_text);

// Each command validates its inputs, runs, and writes outputs under rc.out.
// Errors propagate as the library exception types; the CLI maps them to exit
// codes.  Returns the paths written (for logging).
std::vector<std::string> cmd_characterize_qubits(const RunConfig& rc);
std::vector<std::string> cmd_characterize_coupling(const RunConfig& rc);
std::vector<std::string> cmd_train(const RunConfig& rc);
std::vector<std::string> cmd_test(const RunConfig& rc);
std::vector<std::string> cmd_sample(const RunConfig& rc);

}  // namespace cbm

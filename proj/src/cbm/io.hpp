#pragma once
#include <cstdint>
#include <filesystem>
#include <string>

#include "cbm/ising.hpp"
#include "cbm/network.hpp"

namespace cbm {

// Every artifact is written whole through a temp file + rename so a crash
// never leaves a truncated file at the final path, and every number is
// formatted with std::to_chars (locale-free shortest round-trip), so a rerun
// that computes the same values emits the same bytes.

void atomic_write(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);  // throws DataError

std::string format_double(double v);
std::string format_int(long long v);

// Problem text format (tokens separated by whitespace, one statement per line):
//   topology chimera R C
//   inactive q0 q1 ...        (optional)
//   linear i v                (only nonzero terms)
//   quadratic i j v           (only nonzero terms; {i,j} must be a coupler)
std::string problem_to_text(const Problem& p);
Problem problem_from_text(const std::string& text);
Problem read_problem(const std::filesystem::path& path);
void write_problem(const std::filesystem::path& path, const Problem& p);

// One row per read: every site's bit (inactive sites stay 0) then the energy.
std::string sampleset_to_csv(const Topology& topo, const SampleSet& ss);

// Versioned binary checkpoint of a digit network: topology, tile layout, all
// weight groups (inter-layer, per-tile intra, virtual), the training config
// (whose seed is the root of every derived RNG stream, i.e. the full RNG
// state of the scheme), and the pass/variant counters needed to resume or
// re-score.  Little-endian, fixed-width fields; magic "CBNET001".
struct Checkpoint {
  Network net;
  TrainConfig cfg;
  int passes_done = 0;
  int variant = 50;
  uint64_t split_seed = 0;
};

void write_checkpoint(const std::filesystem::path& path, const Network& net,
                      const TrainConfig& cfg, int passes_done, int variant,
                      uint64_t split_seed);
Checkpoint read_checkpoint(const std::filesystem::path& path);  // throws DataError

}  // namespace cbm

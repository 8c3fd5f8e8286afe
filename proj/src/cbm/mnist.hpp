#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace cbm {

// A 28x28 image normalized to [0,1] plus a 10-way one-hot flag vector.
// Gray (random noise) images carry all-zero flags and label -1.
struct LabeledImage {
  std::array<double, 784> pixels{};
  std::array<double, 10> flags{};
  bool is_noise = false;
  int label = -1;  // 0..9, or -1 for noise
};

// Parse standard IDX image/label files (big-endian, magics 2051/2049).
// Throws DataError on malformed input or count mismatch.
std::vector<LabeledImage> parse_idx(const std::string& image_path,
                                    const std::string& label_path);

// Per-pixel uniform [0,1) noise images, all flags zero.
std::vector<LabeledImage> make_gray_images(int count, uint64_t seed);

struct ExperimentSplit {
  int variant = 50;  // 50 | 100 | 200
  uint64_t seed = 0;
  std::vector<LabeledImage> training;  // variant digits + variant/5 gray images
  std::vector<LabeledImage> test;      // variant digits
  std::vector<int> train_indices;      // dataset indices of the digit entries
  std::vector<int> test_indices;
};

// Disjoint class-balanced train/test digit subsets (variant/10 per digit in
// each, remainder round-robin from digit 0), plus the variant's gray images
// appended to training.  Seeded and reproducible.
ExperimentSplit build_split(const std::vector<LabeledImage>& dataset, int variant,
                            uint64_t seed);

// Structured text recording exactly which dataset entries a split selected.
std::string split_manifest(const ExperimentSplit& split);

}  // namespace cbm

#include "cbm/mnist.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "cbm/errors.hpp"
#include "cbm/rng.hpp"

namespace cbm {

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

uint32_t be32(const std::vector<uint8_t>& b, size_t off) {
  if (off + 4 > b.size()) throw DataError("idx file truncated");
  return uint32_t(b[off]) << 24 | uint32_t(b[off + 1]) << 16 | uint32_t(b[off + 2]) << 8 |
         uint32_t(b[off + 3]);
}

}  // namespace

std::vector<LabeledImage> parse_idx(const std::string& image_path,
                                    const std::string& label_path) {
  const auto ib = read_file(image_path);
  const auto lb = read_file(label_path);
  if (be32(ib, 0) != 2051) throw DataError(image_path + ": bad image magic (want 2051)");
  if (be32(lb, 0) != 2049) throw DataError(label_path + ": bad label magic (want 2049)");
  const uint32_t n = be32(ib, 4), rows = be32(ib, 8), cols = be32(ib, 12);
  if (rows != 28 || cols != 28)
    throw DataError(image_path + ": expected 28x28 images");
  if (be32(lb, 4) != n) throw DataError("image/label count mismatch");
  if (ib.size() != 16 + size_t(n) * 784) throw DataError(image_path + ": size mismatch");
  if (lb.size() != 8 + size_t(n)) throw DataError(label_path + ": size mismatch");

  std::vector<LabeledImage> out(n);
  for (uint32_t i = 0; i < n; ++i) {
    LabeledImage& im = out[i];
    const uint8_t lab = lb[8 + i];
    if (lab > 9) throw DataError("label out of range 0..9");
    im.label = lab;
    im.flags[lab] = 1.0;
    const size_t base = 16 + size_t(i) * 784;
    for (int px = 0; px < 784; ++px) im.pixels[px] = ib[base + px] / 255.0;
  }
  return out;
}

std::vector<LabeledImage> make_gray_images(int count, uint64_t seed) {
  if (count < 0) throw ValueError("make_gray_images: negative count");
  std::vector<LabeledImage> out(count);
  for (int i = 0; i < count; ++i) {
    Xoshiro128pp rng =
        Xoshiro128pp::from_seed(derive_seed(seed, {0x67726179ull /* "gray" */, uint64_t(i)}));
    out[i].is_noise = true;
    out[i].label = -1;
    for (int px = 0; px < 784; ++px) out[i].pixels[px] = rng.uniform64();
  }
  return out;
}

ExperimentSplit build_split(const std::vector<LabeledImage>& dataset, int variant,
                            uint64_t seed) {
  if (variant != 50 && variant != 100 && variant != 200)
    throw ValueError("variant must be 50, 100, or 200");
  if (int(dataset.size()) < 2 * variant)
    throw ValueError("dataset too small for requested variant");

  std::vector<std::vector<int>> by_digit(10);
  for (size_t i = 0; i < dataset.size(); ++i)
    if (!dataset[i].is_noise && dataset[i].label >= 0)
      by_digit[dataset[i].label].push_back(int(i));

  // per-digit quota: equal counts, remainder round-robin from digit 0
  int want_train[10], want_test[10];
  for (int d = 0; d < 10; ++d)
    want_train[d] = want_test[d] = variant / 10 + (d < variant % 10 ? 1 : 0);

  ExperimentSplit sp;
  sp.variant = variant;
  sp.seed = seed;
  for (int d = 0; d < 10; ++d) {
    auto& pool = by_digit[d];
    if (int(pool.size()) < want_train[d] + want_test[d])
      throw ValueError("not enough images of digit " + std::to_string(d));
    Xoshiro128pp rng =
        Xoshiro128pp::from_seed(derive_seed(seed, {0x73706c6974ull /* "split" */, uint64_t(d)}));
    for (int i = int(pool.size()) - 1; i > 0; --i) {
      const int j = int(rng.next() % uint32_t(i + 1));
      std::swap(pool[i], pool[j]);
    }
    for (int i = 0; i < want_train[d]; ++i) sp.train_indices.push_back(pool[i]);
    for (int i = 0; i < want_test[d]; ++i)
      sp.test_indices.push_back(pool[want_train[d] + i]);
  }
  std::sort(sp.train_indices.begin(), sp.train_indices.end());
  std::sort(sp.test_indices.begin(), sp.test_indices.end());
  for (int i : sp.train_indices) sp.training.push_back(dataset[i]);
  for (int i : sp.test_indices) sp.test.push_back(dataset[i]);

  const auto gray = make_gray_images(variant / 5, derive_seed(seed, {0x6e6f697365ull}));
  sp.training.insert(sp.training.end(), gray.begin(), gray.end());
  return sp;
}

std::string split_manifest(const ExperimentSplit& split) {
  std::ostringstream os;
  os << "variant " << split.variant << '\n';
  os << "seed " << split.seed << '\n';
  os << "gray_images " << split.variant / 5 << '\n';
  os << "train_indices";
  for (int i : split.train_indices) os << ' ' << i;
  os << '\n';
  os << "test_indices";
  for (int i : split.test_indices) os << ' ' << i;
  os << '\n';
  return os.str();
}

}  // namespace cbm

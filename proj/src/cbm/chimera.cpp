#include "cbm/chimera.hpp"

#include <algorithm>
#include <sstream>

#include "cbm/errors.hpp"

namespace cbm {

Topology Topology::build(int rows, int cols, std::span<const int> inactive) {
  if (rows < 1 || cols < 1)
    throw ValueError("topology: rows and cols must be >= 1");
  Topology t;
  t.rows_ = rows;
  t.cols_ = cols;
  const int n = t.num_sites();
  t.active_.assign(n, 1);
  for (int q : inactive) {
    if (q < 0 || q >= n)
      throw ValueError("topology: inactive index " + std::to_string(q) + " out of range");
    t.active_[q] = 0;
  }
  t.rank_.assign(n, -1);
  for (int q = 0; q < n; ++q) {
    if (t.active_[q]) {
      t.rank_[q] = int(t.active_sites_.size());
      t.active_sites_.push_back(q);
    } else {
      t.inactive_sites_.push_back(q);
    }
  }

  auto add_edge = [&](int a, int b, CouplerKind kind) {
    if (a > b) std::swap(a, b);
    if (t.active_[a] && t.active_[b]) t.couplers_.push_back({a, b, kind});
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int base = (r * cols + c) * cell_size;
      // intra-cell K4,4: every low-side qubit to every high-side qubit
      for (int lo = 0; lo < shore; ++lo)
        for (int hi = 0; hi < shore; ++hi)
          add_edge(base + lo, base + shore + hi, CouplerKind::intra);
      // inter-cell: low side couples vertically, high side horizontally,
      // same offset on both ends
      if (r + 1 < rows)
        for (int k = 0; k < shore; ++k)
          add_edge(base + k, base + cols * cell_size + k, CouplerKind::inter);
      if (c + 1 < cols)
        for (int k = 0; k < shore; ++k)
          add_edge(base + shore + k, base + cell_size + shore + k, CouplerKind::inter);
    }
  }
  std::sort(t.couplers_.begin(), t.couplers_.end(),
            [](const Coupler& x, const Coupler& y) {
              return x.a != y.a ? x.a < y.a : x.b < y.b;
            });

  // CSR adjacency
  t.indptr_.assign(n + 1, 0);
  for (const Coupler& c : t.couplers_) {
    ++t.indptr_[c.a + 1];
    ++t.indptr_[c.b + 1];
  }
  for (int q = 0; q < n; ++q) t.indptr_[q + 1] += t.indptr_[q];
  t.adj_site_.resize(t.indptr_[n]);
  t.adj_coupler_.resize(t.indptr_[n]);
  std::vector<int> cursor(t.indptr_.begin(), t.indptr_.end() - 1);
  for (int ci = 0; ci < int(t.couplers_.size()); ++ci) {
    const Coupler& c = t.couplers_[ci];
    t.adj_site_[cursor[c.a]] = c.b;
    t.adj_coupler_[cursor[c.a]++] = ci;
    t.adj_site_[cursor[c.b]] = c.a;
    t.adj_coupler_[cursor[c.b]++] = ci;
  }
  return t;
}

int Topology::find_coupler(int a, int b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(couplers_.begin(), couplers_.end(), std::pair{a, b},
                             [](const Coupler& c, const std::pair<int, int>& p) {
                               return c.a != p.first ? c.a < p.first : c.b < p.second;
                             });
  if (it != couplers_.end() && it->a == a && it->b == b)
    return int(it - couplers_.begin());
  return -1;
}

std::vector<int> Topology::neighbors(int q) const {
  if (q < 0 || q >= num_sites())
    throw ValueError("neighbors: qubit index out of range");
  if (!active_[q]) throw ValueError("neighbors: qubit is inactive");
  std::vector<int> out(adj_site_.begin() + indptr_[q], adj_site_.begin() + indptr_[q + 1]);
  std::sort(out.begin(), out.end());
  return out;
}

int Topology::index_of(const QubitPos& p) const {
  if (p.row < 0 || p.row >= rows_ || p.col < 0 || p.col >= cols_ || p.side < 0 ||
      p.side > 1 || p.offset < 0 || p.offset >= shore)
    throw ValueError("index_of: position out of range");
  return (p.row * cols_ + p.col) * cell_size + p.side * shore + p.offset;
}

QubitPos Topology::pos_of(int index) const {
  if (index < 0 || index >= num_sites())
    throw ValueError("pos_of: index out of range");
  QubitPos p;
  const int cell = index / cell_size;
  const int in = index % cell_size;
  p.row = cell / cols_;
  p.col = cell % cols_;
  p.side = in / shore;
  p.offset = in % shore;
  return p;
}

std::string Topology::to_text() const {
  std::ostringstream os;
  os << "chimera " << rows_ << ' ' << cols_ << '\n';
  if (!inactive_sites_.empty()) {
    os << "inactive";
    for (int q : inactive_sites_) os << ' ' << q;
    os << '\n';
  }
  return os.str();
}

Topology Topology::from_text(const std::string& text) {
  std::istringstream is(text);
  std::string tag;
  int rows = 0, cols = 0;
  if (!(is >> tag >> rows >> cols) || tag != "chimera")
    throw DataError("topology text: expected 'chimera <rows> <cols>'");
  std::vector<int> inactive;
  if (is >> tag) {
    if (tag != "inactive") throw DataError("topology text: unknown line '" + tag + "'");
    int q;
    while (is >> q) inactive.push_back(q);
  }
  return build(rows, cols, inactive);
}

}  // namespace cbm

#pragma once
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cbm {

// Chimera graph: a rows x cols grid of 8-qubit cells.  Each cell is a
// complete bipartite K4,4 between its "low" side (in-cell offsets 0..3) and
// its "high" side (offsets 4..7).  Low-side qubits couple to the same
// position in the cells above/below; high-side qubits couple to the cells
// left/right.  Linear qubit index:
//
//   index = ((row * cols + col) * 8) + side * 4 + offset
//
// i.e. row-major over cells, low side before high side within a cell.
// Dead qubits are handled by an active mask instead of renumbering, so
// problem files stay stable across masks.

struct QubitPos {
  int row = 0, col = 0;
  int side = 0;    // 0 = low, 1 = high
  int offset = 0;  // 0..3 within the side
  bool operator==(const QubitPos&) const = default;
};

enum class CouplerKind : uint8_t { intra, inter };

struct Coupler {
  int a = 0, b = 0;  // qubit linear indices, a < b
  CouplerKind kind = CouplerKind::intra;
};

class Topology {
 public:
  static constexpr int shore = 4;
  static constexpr int cell_size = 2 * shore;

  // Full chimera edge set minus everything incident to an inactive qubit.
  // Throws ValueError for non-positive grid sizes or out-of-range indices.
  static Topology build(int rows, int cols, std::span<const int> inactive = {});

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int num_sites() const { return rows_ * cols_ * cell_size; }
  int num_active() const { return int(active_sites_.size()); }
  bool is_active(int q) const { return q >= 0 && q < num_sites() && active_[q]; }

  // Active qubit indices in increasing order.
  const std::vector<int>& active_sites() const { return active_sites_; }

  // Position of q among the active qubits, -1 if inactive.
  int active_rank(int q) const { return rank_[q]; }

  // Active couplers in canonical order: sorted by (a, b).
  const std::vector<Coupler>& couplers() const { return couplers_; }

  // Index into couplers() for the unordered pair {a,b}, or -1.
  int find_coupler(int a, int b) const;

  // Active qubits sharing a coupler with q.  Throws ValueError if q is out
  // of range or inactive.
  std::vector<int> neighbors(int q) const;

  // CSR adjacency over all sites (inactive sites have empty ranges):
  // for k in [indptr[q], indptr[q+1]): adjacent_site[k], adjacent_coupler[k].
  const std::vector<int>& indptr() const { return indptr_; }
  const std::vector<int>& adjacent_site() const { return adj_site_; }
  const std::vector<int>& adjacent_coupler() const { return adj_coupler_; }

  int index_of(const QubitPos& p) const;
  QubitPos pos_of(int index) const;

  // Small text format: "chimera <rows> <cols>" plus an optional
  // "inactive i j k ..." line.
  std::string to_text() const;
  static Topology from_text(const std::string& text);

  const std::vector<int>& inactive_sites() const { return inactive_sites_; }

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<uint8_t> active_;
  std::vector<int> active_sites_;
  std::vector<int> inactive_sites_;
  std::vector<int> rank_;
  std::vector<Coupler> couplers_;
  std::vector<int> indptr_, adj_site_, adj_coupler_;
};

}  // namespace cbm

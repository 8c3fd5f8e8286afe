#include "doctest.h"

#include <algorithm>
#include <set>

#include "cbm/chimera.hpp"
#include "cbm/errors.hpp"

using namespace cbm;

namespace {
int count_kind(const Topology& t, CouplerKind k) {
  int n = 0;
  for (const Coupler& c : t.couplers()) n += c.kind == k ? 1 : 0;
  return n;
}
}  // namespace

TEST_CASE("full-size grid counts") {
  const Topology t = Topology::build(8, 8);
  CHECK(t.num_sites() == 512);
  CHECK(t.num_active() == 512);
  CHECK(count_kind(t, CouplerKind::intra) == 1024);  // 16 per cell * 64
  CHECK(count_kind(t, CouplerKind::inter) == 448);   // 4*7*8 vertical + 4*8*7 horizontal
  CHECK(t.couplers().size() == 1472);
}

TEST_CASE("small grid counts") {
  const Topology t33 = Topology::build(3, 3);
  CHECK(t33.num_sites() == 72);
  CHECK(count_kind(t33, CouplerKind::intra) == 144);
  CHECK(count_kind(t33, CouplerKind::inter) == 48);

  const Topology t11 = Topology::build(1, 1);
  CHECK(t11.num_sites() == 8);
  CHECK(t11.couplers().size() == 16);
  CHECK(count_kind(t11, CouplerKind::inter) == 0);
}

TEST_CASE("index <-> position round trip") {
  const Topology t = Topology::build(4, 5);
  for (int q = 0; q < t.num_sites(); ++q) {
    const QubitPos p = t.pos_of(q);
    CHECK(t.index_of(p) == q);
    CHECK(p.side == (q % 8) / 4);
    CHECK(p.offset == q % 4);
  }
  CHECK(t.index_of({0, 0, 0, 0}) == 0);
  CHECK(t.index_of({1, 2, 1, 3}) == ((1 * 5 + 2) * 8) + 4 + 3);
}

TEST_CASE("hand-checked adjacency in a 2x2 grid") {
  const Topology t = Topology::build(2, 2);
  // qubit 0 = cell(0,0) low 0: the four high-side qubits of its cell plus
  // the low-0 qubit of the cell below.
  CHECK(t.neighbors(0) == std::vector<int>{4, 5, 6, 7, 16});
  // qubit 4 = cell(0,0) high 0: its cell's low side plus high-0 to the right.
  CHECK(t.neighbors(4) == std::vector<int>{0, 1, 2, 3, 12});
  // qubit 28 = cell(1,1) high 0: no cell to the right, so intra only... plus
  // the horizontal link back to cell(1,0) high 0 = 20.
  CHECK(t.neighbors(28) == std::vector<int>{20, 24, 25, 26, 27});
}

TEST_CASE("adjacency is symmetric and matches couplers") {
  const Topology t = Topology::build(3, 2);
  for (const Coupler& c : t.couplers()) {
    const auto na = t.neighbors(c.a);
    const auto nb = t.neighbors(c.b);
    CHECK(std::find(na.begin(), na.end(), c.b) != na.end());
    CHECK(std::find(nb.begin(), nb.end(), c.a) != nb.end());
    CHECK(t.find_coupler(c.a, c.b) >= 0);
    CHECK(t.find_coupler(c.b, c.a) == t.find_coupler(c.a, c.b));
  }
  CHECK(t.find_coupler(0, 1) == -1);  // same shore, never coupled
}

TEST_CASE("couplers are sorted canonically") {
  const Topology t = Topology::build(2, 3);
  const auto& cs = t.couplers();
  for (size_t i = 0; i < cs.size(); ++i) {
    CHECK(cs[i].a < cs[i].b);
    if (i > 0)
      CHECK((cs[i - 1].a < cs[i].a ||
             (cs[i - 1].a == cs[i].a && cs[i - 1].b < cs[i].b)));
  }
}

TEST_CASE("inactive qubits drop incident couplers without renumbering") {
  const std::vector<int> dead = {0, 13};
  const Topology t = Topology::build(2, 2, dead);
  CHECK(t.num_sites() == 32);
  CHECK(t.num_active() == 30);
  CHECK_FALSE(t.is_active(0));
  CHECK_FALSE(t.is_active(13));
  CHECK(t.is_active(1));
  // qubit 0 had 5 couplers, qubit 13 had 5 (4 intra + horizontal); disjoint.
  const Topology full = Topology::build(2, 2);
  CHECK(t.couplers().size() == full.couplers().size() - 10);
  CHECK_THROWS_AS((void)t.neighbors(0), ValueError);
  // neighbors of 4 lost qubit 0 but kept the rest
  CHECK(t.neighbors(4) == std::vector<int>{1, 2, 3, 12});
  // ranks stay dense over active sites only
  CHECK(t.active_rank(1) == 0);
  CHECK(int(t.active_sites().size()) == 30);
}

TEST_CASE("build validation") {
  CHECK_THROWS_AS((void)Topology::build(0, 3), ValueError);
  CHECK_THROWS_AS((void)Topology::build(3, -1), ValueError);
  const std::vector<int> oob = {64};
  CHECK_THROWS_AS((void)Topology::build(2, 4, oob), ValueError);
  const std::vector<int> neg = {-1};
  CHECK_THROWS_AS((void)Topology::build(2, 4, neg), ValueError);
}

TEST_CASE("neighbors rejects out-of-range and inactive queries") {
  const Topology t = Topology::build(1, 1);
  CHECK_THROWS_AS((void)t.neighbors(-1), ValueError);
  CHECK_THROWS_AS((void)t.neighbors(8), ValueError);
}

TEST_CASE("text round trip") {
  const std::vector<int> dead = {3, 17};
  const Topology t = Topology::build(3, 2, dead);
  const Topology u = Topology::from_text(t.to_text());
  CHECK(u.rows() == 3);
  CHECK(u.cols() == 2);
  CHECK(u.num_active() == t.num_active());
  CHECK(u.inactive_sites() == t.inactive_sites());
  CHECK(u.couplers().size() == t.couplers().size());
}

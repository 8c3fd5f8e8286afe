#include "doctest.h"

#include <cmath>
#include <memory>

#include "cbm/errors.hpp"
#include "cbm/network.hpp"

using namespace cbm;

namespace {
std::shared_ptr<const Topology> cell() {
  return std::make_shared<Topology>(Topology::build(1, 1));
}
std::shared_ptr<const Topology> grid88() {
  return std::make_shared<Topology>(Topology::build(8, 8));
}

LabeledImage blank_image(int label) {
  LabeledImage im;
  im.label = label;
  im.flags[label] = 1.0;
  return im;
}
}  // namespace

TEST_CASE("bias normalization names round trip") {
  CHECK(bias_norm_from_name("layer_size") == BiasNorm::layer_size);
  CHECK(bias_norm_from_name("active_mass") == BiasNorm::active_mass);
  CHECK_THROWS_AS((void)bias_norm_from_name("mean"), ValueError);
}

TEST_CASE("train config validation") {
  TrainConfig tc;
  CHECK_NOTHROW(tc.validate());
  tc.learning_rate = -0.1;
  CHECK_THROWS_AS(tc.validate(), ValueError);
  tc = {};
  tc.phase12_iterations = 1;  // f would never hold a data/response pairing
  CHECK_THROWS_AS(tc.validate(), ValueError);
  tc = {};
  tc.weight_init_range = 1.5;
  CHECK_THROWS_AS(tc.validate(), ValueError);
}

TEST_CASE("unit bias: worked contribution arithmetic") {
  // One unit (layer Y) reading two layers: X with weights (0.4, -0.2) against
  // expectations (1.0, 0.5), Z with weight 0.8 against expectation 0.75.
  Network net;
  const int x = net.add_visible_layer("x", 2);
  const int y = net.add_visible_layer("y", 1);
  const int z = net.add_visible_layer("z", 1);
  net.connect(y, x);
  net.connect(y, z);
  net.layer(x).e = {1.0, 0.5};
  net.layer(z).e = {0.75};
  net.groups()[0].w = {0.4, -0.2};
  net.groups()[1].w = {0.8};

  SUBCASE("layer_size: divide by unit count") {
    // X contributes (0.4*1.0 - 0.2*0.5)/2 = 0.15, Z contributes 0.6
    Network one = net;
    one.groups()[1].w = {0.0};
    CHECK(one.unit_bias(y, 0, BiasNorm::layer_size) ==
          doctest::Approx(0.15 / 2).epsilon(1e-12));  // mean over both contributions
    CHECK(net.unit_bias(y, 0, BiasNorm::layer_size) ==
          doctest::Approx((0.15 + 0.6) / 2).epsilon(1e-12));
  }
  SUBCASE("active_mass: divide by expectation mass") {
    // X contributes 0.3/1.5 = 0.2, Z contributes 0.6/0.75 = 0.8
    CHECK(net.unit_bias(y, 0, BiasNorm::active_mass) ==
          doctest::Approx((0.2 + 0.8) / 2).epsilon(1e-12));
  }
  SUBCASE("zero mass contributes zero instead of dividing by zero") {
    net.layer(x).e = {0.0, 0.0};
    CHECK(net.unit_bias(y, 0, BiasNorm::active_mass) ==
          doctest::Approx(0.8 / 2).epsilon(1e-12));
  }
  SUBCASE("weights are used symmetrically from the other side") {
    net.layer(y).e = {1.0};
    net.layer(z).e = {0.0};
    // unit 0 of X sees Y through w[0]=0.4: dot 0.4, mass 1
    CHECK(net.unit_bias(x, 0, BiasNorm::active_mass) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(net.unit_bias(x, 1, BiasNorm::layer_size) == doctest::Approx(-0.2).epsilon(1e-12));
  }
}

TEST_CASE("unit bias requires a connection") {
  Network net;
  const int lonely = net.add_visible_layer("lonely", 3);
  CHECK_THROWS_AS((void)net.unit_bias(lonely, 0, BiasNorm::active_mass), StateError);
}

TEST_CASE("phase 2 visible response values") {
  Network net;
  const int a = net.add_visible_layer("a", 3);
  net.layer(a).bias = {0.0, 1.0, -1.0};
  net.phase2_visible(a, 7.0);
  CHECK(net.layer(a).e[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(net.layer(a).e[1] == doctest::Approx(0.000911051194).epsilon(1e-6));
  CHECK(net.layer(a).e[2] == doctest::Approx(0.999088948806).epsilon(1e-6));
}

TEST_CASE("phase 3 applies the two-point rule with clamping") {
  Network net;
  const int a = net.add_visible_layer("a", 1);
  const int b = net.add_visible_layer("b", 1);
  net.connect(a, b);
  net.groups()[0].w = {0.1};
  net.layer(a).e = {0.9};
  net.layer(b).e = {0.8};
  net.layer(a).f = {0.2};
  net.layer(b).f = {0.5};
  net.phase3_update(0.5, true);
  // dw = 0.5 * (0.9*0.8 - 0.2*0.5) = 0.31
  CHECK(net.groups()[0].w[0] == doctest::Approx(0.41).epsilon(1e-12));

  net.groups()[0].w = {0.9};
  net.layer(a).f = {0.0};
  net.layer(b).f = {0.0};
  net.phase3_update(1.0, true);  // 0.9 + 0.72 clamps to 1
  CHECK(net.groups()[0].w[0] == 1.0);
  net.groups()[0].w = {-0.9};
  net.layer(a).e = {0.0};
  net.layer(a).f = {0.9};
  net.layer(b).f = {0.9};
  net.phase3_update(1.0, true);  // -0.9 - 0.81 clamps to -1
  CHECK(net.groups()[0].w[0] == -1.0);
}

TEST_CASE("training fixed points") {
  Network net = Network::digit_network(cell(), Tiling{1, 1});
  net.init_weights(5, 0.1);
  const LabeledImage im = blank_image(3);
  SamplerConfig scfg;
  TrainConfig tc;
  tc.reads_per_sample = 50;

  SUBCASE("k = 0 leaves every weight untouched") {
    tc.learning_rate = 0.0;
    Network before = net;
    net.train_cycle(im, Backend::exact, scfg, tc, 77);
    CHECK(net.groups()[0].w == before.groups()[0].w);
    CHECK(net.groups()[1].w == before.groups()[1].w);
    CHECK(net.hidden_infos()[0].intra_w == before.hidden_infos()[0].intra_w);
  }
  SUBCASE("e = f is a fixed point of phase 3") {
    Network before = net;
    for (int li = 0; li < net.num_layers(); ++li) {
      auto& L = net.layer(li);
      for (int u = 0; u < L.size; ++u) {
        L.e[u] = 0.25 + 0.5 * (u % 2);
        L.f[u] = L.e[u];
      }
    }
    net.phase3_update(0.7, true);
    CHECK(net.groups()[0].w == before.groups()[0].w);
    CHECK(net.groups()[1].w == before.groups()[1].w);
    CHECK(net.hidden_infos()[0].intra_w == before.hidden_infos()[0].intra_w);
  }
}

TEST_CASE("train cycle holds visibles on the data through the first iteration") {
  Network net = Network::digit_network(cell(), Tiling{1, 1});
  net.init_weights(11, 0.1);
  LabeledImage im = blank_image(2);
  for (int px = 0; px < 784; ++px) im.pixels[px] = (px % 5) / 4.0;
  SamplerConfig scfg;
  TrainConfig tc;
  tc.reads_per_sample = 50;

  net.train_cycle(im, Backend::exact, scfg, tc, 3);
  const Layer& img = net.layer(net.image_layer());
  const Layer& flg = net.layer(net.flag_layer());
  // f snapshots the data side of the first iteration
  for (int px = 0; px < 784; ++px) CHECK(img.f[px] == im.pixels[px]);
  CHECK(flg.f[2] == 1.0);
  CHECK(flg.f[3] == 0.0);
  // and e moved on to the free reconstruction (iteration 2)
  bool moved = false;
  for (int px = 0; px < 784 && !moved; ++px) moved = img.e[px] != im.pixels[px];
  CHECK(moved);

  SUBCASE("clamp_visible holds the data for every iteration") {
    tc.clamp_visible = true;
    net.train_cycle(im, Backend::exact, scfg, tc, 4);
    const Layer& img2 = net.layer(net.image_layer());
    for (int px = 0; px < 784; ++px) CHECK(img2.e[px] == im.pixels[px]);
  }
}

TEST_CASE("train cycle is deterministic") {
  SamplerConfig scfg;
  TrainConfig tc;
  tc.reads_per_sample = 40;
  LabeledImage im = blank_image(7);
  im.pixels[100] = 0.9;
  auto run = [&]() {
    Network net = Network::digit_network(cell(), Tiling{1, 1});
    net.init_weights(9, 0.1);
    for (int c = 0; c < 3; ++c) net.train_cycle(im, Backend::gibbs, scfg, tc, 100 + c);
    return net.groups()[0].w;
  };
  CHECK(run() == run());
}

TEST_CASE("zero-weight network scores by tie-break only") {
  Network net = Network::digit_network(cell(), Tiling{1, 1});  // weights all 0
  SamplerConfig scfg;
  TrainConfig tc;
  tc.reads_per_sample = 30;

  std::vector<LabeledImage> set;
  for (int d = 0; d < 10; ++d) set.push_back(blank_image(d));

  const auto order = net.test_cycle(set[4], Backend::exact, scfg, tc, 5);
  const Layer& flg = net.layer(net.flag_layer());
  for (int d = 0; d < 10; ++d) CHECK(flg.e[d] == doctest::Approx(0.5).epsilon(1e-12));
  for (int d = 0; d < 10; ++d) CHECK(order[d] == d);  // stable tie-break

  const Scores s = evaluate(net, set, Backend::exact, scfg, tc, 8);
  CHECK(s.counted == 10);
  CHECK(s.top1 == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.top3 == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("evaluate skips noise images") {
  Network net = Network::digit_network(cell(), Tiling{1, 1});
  SamplerConfig scfg;
  TrainConfig tc;
  tc.reads_per_sample = 20;
  std::vector<LabeledImage> set = {blank_image(0), blank_image(1)};
  LabeledImage noise;
  noise.is_noise = true;
  set.push_back(noise);
  const Scores s = evaluate(net, set, Backend::exact, scfg, tc, 3);
  CHECK(s.counted == 2);
}

TEST_CASE("virtual tiling geometry") {
  SUBCASE("1x2 over the full grid: units double, 32 boundary couplers") {
    Network net = Network::digit_network(grid88(), Tiling{1, 2});
    const HiddenInfo& hi = net.hidden_infos()[0];
    CHECK(net.layer(hi.layer).size == 1024);
    CHECK(hi.virtual_edges.size() == 32);  // 8 rows x 4 high-side offsets
    CHECK(hi.virtual_w.size() == 32);
    CHECK(hi.intra_w.size() == 2 * 1472);
    const Topology& t = *hi.topo;
    for (const VirtualEdge& e : hi.virtual_edges) {
      CHECK(e.unit_a < 512);
      CHECK(e.unit_b >= 512);
      // right-edge high-side qubit joins the same row/offset on the left edge
      const QubitPos pa = t.pos_of(t.active_sites()[e.unit_a]);
      const QubitPos pb = t.pos_of(t.active_sites()[e.unit_b - 512]);
      CHECK(pa.side == 1);
      CHECK(pb.side == 1);
      CHECK(pa.col == 7);
      CHECK(pb.col == 0);
      CHECK(pa.row == pb.row);
      CHECK(pa.offset == pb.offset);
    }
  }
  SUBCASE("2x1 stacks vertically through low-side qubits") {
    Network net = Network::digit_network(grid88(), Tiling{2, 1});
    const HiddenInfo& hi = net.hidden_infos()[0];
    CHECK(hi.virtual_edges.size() == 32);  // 8 cols x 4 low-side offsets
    const Topology& t = *hi.topo;
    for (const VirtualEdge& e : hi.virtual_edges) {
      const QubitPos pa = t.pos_of(t.active_sites()[e.unit_a]);
      CHECK(pa.side == 0);
      CHECK(pa.row == 7);
    }
  }
  SUBCASE("masked boundary qubits drop their virtual couplers") {
    const std::vector<int> dead = {60};  // (0, 7, high, 0): a right-edge qubit
    auto topo = std::make_shared<Topology>(Topology::build(8, 8, dead));
    Network net = Network::digit_network(topo, Tiling{1, 2});
    CHECK(net.hidden_infos()[0].virtual_edges.size() == 31);
  }
}

TEST_CASE("zero virtual couplers leave tiles independent") {
  // Boundary units must see exactly the same bias whether their virtual
  // couplers are all zero or the tiling is physically split apart.
  Network tiled = Network::digit_network(cell(), Tiling{1, 2});
  tiled.init_weights(21, 0.1);
  for (double& w : tiled.hidden_infos()[0].virtual_w) w = 0.0;

  LabeledImage im = blank_image(1);
  for (int px = 0; px < 784; ++px) im.pixels[px] = ((px * 37) % 11) / 10.0;

  // single-tile copy carrying tile 0's weight slices
  Network solo = Network::digit_network(cell(), Tiling{1, 1});
  const int h_tiled = tiled.hidden_infos()[0].layer;
  const int h_solo = solo.hidden_infos()[0].layer;
  for (size_t g = 0; g < solo.groups().size(); ++g) {
    const auto& wt = tiled.groups()[g].w;  // [visible * 16]
    auto& ws = solo.groups()[g].w;         // [visible * 8]
    const int va = solo.layer(solo.groups()[g].layer_a).size;
    for (int i = 0; i < va; ++i)
      for (int j = 0; j < 8; ++j) ws[i * 8 + j] = wt[i * 16 + j];
  }
  solo.hidden_infos()[0].intra_w.assign(
      tiled.hidden_infos()[0].intra_w.begin(),
      tiled.hidden_infos()[0].intra_w.begin() + 16);

  auto load = [&](Network& n) {
    n.layer(n.image_layer()).e.assign(im.pixels.begin(), im.pixels.end());
    n.layer(n.flag_layer()).e.assign(im.flags.begin(), im.flags.end());
    n.compute_phase1(n.hidden_infos()[0].layer, BiasNorm::active_mass);
  };
  load(tiled);
  load(solo);
  for (int u = 0; u < 8; ++u)
    CHECK(tiled.layer(h_tiled).bias[u] == solo.layer(h_solo).bias[u]);
}

TEST_CASE("init_weights is seeded and range-bounded") {
  Network a = Network::digit_network(cell(), Tiling{1, 2});
  Network b = Network::digit_network(cell(), Tiling{1, 2});
  a.init_weights(33, 0.25);
  b.init_weights(33, 0.25);
  CHECK(a.groups()[0].w == b.groups()[0].w);
  CHECK(a.hidden_infos()[0].virtual_w == b.hidden_infos()[0].virtual_w);
  b.init_weights(34, 0.25);
  CHECK(a.groups()[0].w != b.groups()[0].w);
  for (double w : a.groups()[0].w) {
    CHECK(w <= 0.25);
    CHECK(w >= -0.25);
  }
  bool any_nonzero = false;
  for (double w : a.hidden_infos()[0].intra_w) any_nonzero |= w != 0.0;
  CHECK(any_nonzero);
}

#include "doctest.h"

#include <cmath>
#include <memory>

#include "cbm/errors.hpp"
#include "cbm/exact.hpp"
#include "cbm/gibbs.hpp"

using namespace cbm;

namespace {
std::shared_ptr<const Topology> cell() {
  return std::make_shared<Topology>(Topology::build(1, 1));
}
std::shared_ptr<const Topology> lone_pair() {
  const std::vector<int> dead = {1, 2, 3, 5, 6, 7};
  return std::make_shared<Topology>(Topology::build(1, 1, dead));
}
}  // namespace

TEST_CASE("single-qubit marginal is the closed-form sigmoid") {
  SamplerConfig cfg;
  auto check_bias = [&](double b, double want) {
    Problem p(cell());
    p.set_linear(0, b);
    const auto m = exact_marginals(p, cfg);
    CHECK(m[0] == doctest::Approx(want).epsilon(1e-9));
  };
  check_bias(0.25, 0.148047198032);
  check_bias(1.0, 0.000911051194);
  check_bias(-1.0, 0.999088948806);
  check_bias(0.0, 0.5);
}

TEST_CASE("ferromagnetic pair joint matches the Boltzmann weights") {
  Problem p(lone_pair());
  p.set_quadratic(0, 4, 1.0);  // antialigned pair, E(11)=1, others 0
  SamplerConfig cfg;
  const PairStats st = ExactDist::compute(p, cfg).pair_stats(0, 4);
  const double e7 = std::exp(-7.0);
  CHECK(st.p11 == doctest::Approx(e7 / (3 + e7)).epsilon(1e-12));
  CHECK(st.p10 == doctest::Approx(1 / (3 + e7)).epsilon(1e-12));
  CHECK(st.p01 == doctest::Approx(1 / (3 + e7)).epsilon(1e-12));
  CHECK(st.p00 == doctest::Approx(1 / (3 + e7)).epsilon(1e-12));
  CHECK(st.p11 + st.p10 + st.p01 + st.p00 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(st.p11 == doctest::Approx(0.000304).epsilon(2e-3));
}

TEST_CASE("capacity bound sits exactly at 20 qubits") {
  std::vector<int> dead;
  for (int q = 20; q < 32; ++q) dead.push_back(q);
  Problem ok(std::make_shared<Topology>(Topology::build(2, 2, dead)));
  SamplerConfig cfg;
  CHECK_NOTHROW((void)exact_marginals(ok, cfg));

  dead.pop_back();  // 21 active now
  Problem too_big(std::make_shared<Topology>(Topology::build(2, 2, dead)));
  CHECK_THROWS_AS((void)exact_marginals(too_big, cfg), CapacityError);
}

TEST_CASE("exact sampling follows the enumerated distribution") {
  Problem p(cell());
  p.set_linear(0, -0.4);
  p.set_quadratic(0, 4, -0.5);
  SamplerConfig cfg;
  cfg.seed = 17;

  const SampleSet a = exact_sample(p, 20000, cfg);
  const SampleSet b = exact_sample(p, 20000, cfg);
  CHECK(a.assignments == b.assignments);
  CHECK(a.energies == b.energies);
  for (int r = 0; r < 50; ++r) CHECK(a.energies[r] == p.energy(a.assignments[r]));

  const auto want = exact_marginals(p, cfg);
  const auto got = a.expected_values();
  for (int q = 0; q < 8; ++q) CHECK(got[q] == doctest::Approx(want[q]).scale(1.0).epsilon(0.02));
}

TEST_CASE("exact and gibbs backends agree on a coupled cell") {
  Problem p(cell());
  p.set_linear(0, 0.2);
  p.set_linear(5, -0.3);
  p.set_quadratic(0, 5, -0.8);
  p.set_quadratic(2, 6, 0.4);
  SamplerConfig cfg;
  cfg.seed = 23;

  const auto exact = exact_marginals(p, cfg);
  const auto gibbs = gibbs_marginals(p, 40000, cfg);
  for (int q = 0; q < 8; ++q)
    CHECK(gibbs[q] == doctest::Approx(exact[q]).scale(1.0).epsilon(0.015));
}

TEST_CASE("exact marginals honor the noise offsets") {
  SamplerConfig cfg;
  cfg.noise_std = 0.2;
  cfg.noise_seed = 777;
  auto topo = cell();
  const auto offs = noise_offsets(*topo, cfg);
  Problem p(topo);
  const auto m = exact_marginals(p, cfg);
  for (int q = 0; q < 8; ++q) {
    const double want = 1.0 / (1.0 + std::exp(7.0 * offs[q]));
    CHECK(m[q] == doctest::Approx(want).epsilon(1e-9));
  }
}

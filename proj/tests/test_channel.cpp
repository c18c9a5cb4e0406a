#include <cmath>
#include <numeric>

#include <catch2/catch_amalgamated.hpp>

#include "noma/channel.hpp"
#include "noma/units.hpp"

using namespace noma;

TEST_CASE("scenario draws are reproducible") {
  ScenarioConfig cfg;
  cfg.num_users = 12;
  cfg.num_rbs = 4;
  cfg.seed = 99;
  const Scenario a = draw_scenario(cfg);
  const Scenario b = draw_scenario(cfg);
  REQUIRE(a.gains.size() == b.gains.size());
  for (int u = 0; u < cfg.num_users; ++u)
    for (int m = 0; m < cfg.num_rbs; ++m)
      CHECK(a.gains[u][m] == b.gains[u][m]);  // bit-identical

  cfg.seed = 100;
  const Scenario c = draw_scenario(cfg);
  CHECK(c.gains[0][0] != a.gains[0][0]);
}

TEST_CASE("cluster sizes are balanced") {
  for (int U = 1; U <= 25; ++U) {
    for (int M = 1; M <= U; ++M) {
      const auto sizes = balanced_cluster_sizes(U, M);
      const int hi = (U + M - 1) / M;
      CHECK(std::accumulate(sizes.begin(), sizes.end(), 0) == U);
      for (int sz : sizes) {
        CHECK(sz <= hi);
        CHECK(sz >= hi - 1);
      }
    }
  }
}

TEST_CASE("ringed placement splits users across rings") {
  ScenarioConfig cfg;
  cfg.num_users = 12;
  cfg.num_rbs = 4;
  cfg.placement = RingedPlacement{{50.0, 100.0, 150.0}};
  Rng rng = Rng::substream(cfg.seed, 0);
  const auto dist = draw_distances_km(cfg, rng);
  int at50 = 0, at100 = 0, at150 = 0;
  for (double d : dist) {
    if (d == 0.050) ++at50;
    if (d == 0.100) ++at100;
    if (d == 0.150) ++at150;
  }
  CHECK(at50 == 4);
  CHECK(at100 == 4);
  CHECK(at150 == 4);

  cfg.num_users = 14;  // remainder goes round-robin to the first rings
  const auto dist2 = draw_distances_km(cfg, rng);
  int counts[3] = {0, 0, 0};
  for (double d : dist2) {
    if (d == 0.050) ++counts[0];
    if (d == 0.100) ++counts[1];
    if (d == 0.150) ++counts[2];
  }
  CHECK(counts[0] == 5);
  CHECK(counts[1] == 5);
  CHECK(counts[2] == 4);
}

TEST_CASE("fading power has unit mean") {
  Rng rng(5);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential();
  const double mean = sum / n;
  CHECK(mean > 0.99);
  CHECK(mean < 1.01);
}

TEST_CASE("mean gain at a fixed distance tracks the path loss") {
  ScenarioConfig cfg;
  cfg.num_users = 1000;
  cfg.num_rbs = 100;
  cfg.placement = RingedPlacement{{150.0}};
  cfg.seed = 7;
  const Scenario s = draw_scenario(cfg);
  double sum = 0.0;
  for (const auto& row : s.gains)
    for (double g : row) sum += g;
  const double mean = sum / (1000.0 * 100.0);
  const double expected = pathloss_linear(0.150);
  CHECK(mean == Catch::Approx(expected).epsilon(0.01));
}

TEST_CASE("disk placement is area-uniform") {
  ScenarioConfig cfg;
  cfg.num_users = 100000;
  cfg.num_rbs = 1;
  cfg.placement = DiskPlacement{200.0};
  Rng rng = Rng::substream(1234, 0);
  const auto dist = draw_distances_km(cfg, rng);
  // under area-uniform placement, P(d <= r) = (r/R)^2
  int inside_half = 0;
  for (double d : dist) {
    CHECK(d >= 0.001);
    CHECK(d <= 0.200 + 1e-12);
    if (d <= 0.100) ++inside_half;
  }
  CHECK(static_cast<double>(inside_half) / cfg.num_users ==
        Catch::Approx(0.25).margin(0.01));
}

TEST_CASE("scenario config validation") {
  ScenarioConfig cfg;
  cfg.num_users = 2;
  cfg.num_rbs = 4;  // U < M
  CHECK_THROWS_AS(draw_scenario(cfg), std::invalid_argument);
  cfg.num_rbs = 1;
  cfg.placement = DiskPlacement{-3.0};
  CHECK_THROWS_AS(draw_scenario(cfg), std::invalid_argument);
  cfg.placement = RingedPlacement{{}};
  CHECK_THROWS_AS(draw_scenario(cfg), std::invalid_argument);
}

TEST_CASE("substreams decorrelate trials") {
  Rng a = Rng::substream(42, 0);
  Rng b = Rng::substream(42, 1);
  int equal = 0;
  for (int i = 0; i < 64; ++i)
    if (a.next_u64() == b.next_u64()) ++equal;
  CHECK(equal == 0);
}

#include <cmath>
#include <numeric>

#include <catch2/catch_amalgamated.hpp>

#include "noma/cluster.hpp"
#include "noma/oma.hpp"
#include "support.hpp"

using namespace noma;
using testutil::random_instance;

TEST_CASE("oma rates") {
  ClusterInstance in;
  in.gains = {1.0, 1.0};
  in.min_rates = {0.0, 0.0};
  in.max_powers = {10.0, 10.0};
  in.circuit_power = 1.0;
  in.noise_power = 1.0;
  SECTION("zero powers give zero rates") {
    const auto r = oma_rates(in, {0.0, 0.0});
    CHECK(r[0] == 0.0);
    CHECK(r[1] == 0.0);
  }
  SECTION("two users at P|h|^2 = sigma^2") {
    const auto r = oma_rates(in, {1.0, 1.0});
    CHECK(r[0] == Catch::Approx(0.5 * std::log2(3.0)));
    CHECK(r[1] == Catch::Approx(0.5 * std::log2(3.0)));
  }
  SECTION("single user reduces to the NOMA rate") {
    ClusterInstance one;
    one.gains = {0.7};
    one.min_rates = {0.0};
    one.max_powers = {5.0};
    one.circuit_power = 1e-3;
    one.noise_power = 1.0;
    CHECK(oma_rates(one, {2.0})[0] ==
          Catch::Approx(per_user_rates(one, {2.0})[0]));
  }
}

TEST_CASE("oma minimum powers") {
  ClusterInstance in;
  in.gains = {1.0, 1.0};
  in.min_rates = {1.0, 1.0};
  in.max_powers = {10.0, 10.0};
  in.circuit_power = 0.0;
  in.noise_power = 1.0;
  SECTION("printed example") {
    const auto rep = oma_min_powers(in);
    CHECK(rep.powers[0] == Catch::Approx(1.5));
    CHECK(rep.powers[1] == Catch::Approx(1.5));
  }
  SECTION("zero floors give zero powers") {
    in.min_rates = {0.0, 0.0};
    const auto rep = oma_min_powers(in);
    CHECK(rep.powers[0] == 0.0);
  }
  SECTION("rates are tight at the minimum point") {
    Rng rng(41);
    for (int t = 0; t < 100; ++t) {
      auto inst = random_instance(rng, 2 + static_cast<int>(rng.below(3)));
      const auto rep = oma_min_powers(inst);
      if (!rep.feasible) continue;
      const auto rates = oma_rates(inst, rep.powers);
      for (std::size_t l = 0; l < inst.size(); ++l)
        CHECK(rates[l] == Catch::Approx(inst.min_rates[l]).epsilon(1e-9));
    }
  }
}

TEST_CASE("oma_maximize_ee") {
  Rng rng(42);
  SECTION("single user coincides with the NOMA solver") {
    for (int t = 0; t < 30; ++t) {
      auto in = random_instance(rng, 1);
      const auto a = oma_maximize_ee(in);
      const auto b = maximize_ee(in);
      REQUIRE(a.feasible);
      CHECK(a.ee == Catch::Approx(b.ee).epsilon(1e-8));
    }
  }
  SECTION("matches the per-user golden-section oracle at the final ratio") {
    for (int t = 0; t < 25; ++t) {
      auto in = random_instance(rng, 3);
      const auto rep = oma_min_powers(in);
      if (!rep.feasible) continue;
      const auto sol = oma_maximize_ee(in);
      REQUIRE(sol.feasible);
      const double beta = sol.ee;
      const double L = 3.0;
      double rate = 0.0, total = in.circuit_power;
      for (std::size_t l = 0; l < in.size(); ++l) {
        const std::size_t ll = l;
        const double p = testutil::golden_max(
            [&](double x) {
              return std::log2(1.0 + L * x * in.gains[ll] / in.noise_power) / L -
                     beta * x;
            },
            rep.powers[l], in.max_powers[l], 1e-15);
        rate += std::log2(1.0 + L * p * in.gains[l] / in.noise_power) / L;
        total += p;
      }
      CHECK(sol.ee == Catch::Approx(rate / total).epsilon(1e-6));
    }
  }
  SECTION("permuting users permutes the solution") {
    auto in = random_instance(rng, 3);
    const auto direct = oma_maximize_ee(in);
    const auto back = oma_maximize_ee(reorder_instance(in, {2, 0, 1}));
    REQUIRE(direct.feasible);
    REQUIRE(back.feasible);
    CHECK(direct.ee == Catch::Approx(back.ee).epsilon(1e-10));
    CHECK(direct.powers[2] == Catch::Approx(back.powers[0]).epsilon(1e-10));
    CHECK(direct.powers[0] == Catch::Approx(back.powers[1]).epsilon(1e-10));
  }
  SECTION("infeasible floors are reported") {
    ClusterInstance in;
    in.gains = {1.0, 1.0};
    in.min_rates = {3.0, 3.0};
    in.max_powers = {1.0, 1.0};
    in.circuit_power = 1e-3;
    in.noise_power = 1.0;
    CHECK_FALSE(oma_maximize_ee(in).feasible);
  }
}

TEST_CASE("NOMA dominates OMA without rate floors") {
  Rng rng(43);
  SECTION("pointwise: same powers, higher sum rate") {
    for (int t = 0; t < 300; ++t) {
      auto in = random_instance(rng, 2 + static_cast<int>(rng.below(3)), 0.1, 0.0);
      PowerVector p(in.size());
      for (std::size_t l = 0; l < in.size(); ++l)
        p[l] = rng.uniform01() * in.max_powers[l];
      const auto oma = oma_rates(in, p);
      const double oma_sum = std::accumulate(oma.begin(), oma.end(), 0.0);
      CHECK(sum_rate(in, p) >= oma_sum - 1e-12);
    }
  }
  SECTION("at the respective optima") {
    for (int t = 0; t < 200; ++t) {
      auto in = random_instance(rng, 2 + static_cast<int>(rng.below(2)), 0.1, 0.0);
      const auto noma_sol = maximize_ee(in);
      const auto oma_sol = oma_maximize_ee(in);
      REQUIRE(noma_sol.feasible);
      REQUIRE(oma_sol.feasible);
      CHECK(noma_sol.ee >= oma_sol.ee * (1.0 - 1e-10));
    }
  }
}

TEST_CASE("degrees-of-freedom sanity identity") {
  // equal gains and equal powers: the OMA cluster sum equals one NOMA log
  ClusterInstance in;
  in.gains = {2.0, 2.0};
  in.min_rates = {0.0, 0.0};
  in.max_powers = {10.0, 10.0};
  in.circuit_power = 1e-3;
  in.noise_power = 1.0;
  const PowerVector p{0.75, 0.75};
  const auto r = oma_rates(in, p);
  CHECK(r[0] + r[1] == Catch::Approx(std::log2(1.0 + 2.0 * 0.75 * 2.0)));
}

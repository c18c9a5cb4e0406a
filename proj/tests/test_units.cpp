#include <catch2/catch_amalgamated.hpp>

#include "noma/rng.hpp"
#include "noma/units.hpp"

using namespace noma;

TEST_CASE("pathloss model") {
  CHECK(pathloss_db(1.0) == Catch::Approx(128.0));
  CHECK(pathloss_db(0.1) == Catch::Approx(93.0));
  CHECK(pathloss_db(0.15) == Catch::Approx(99.16338973));
  CHECK_THROWS_AS(pathloss_db(0.0), std::domain_error);
  CHECK_THROWS_AS(pathloss_db(-1.0), std::domain_error);
}

TEST_CASE("pathloss strictly increasing in distance") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const double d1 = rng.uniform(1e-3, 10.0);
    const double d2 = d1 * rng.uniform(1.0001, 3.0);
    CHECK(pathloss_db(d2) > pathloss_db(d1));
  }
}

TEST_CASE("dbm/watt conversions") {
  CHECK(dbm_to_watt(0.0) == Catch::Approx(1e-3));
  CHECK(dbm_to_watt(30.0) == Catch::Approx(1.0));
  CHECK(dbm_to_watt(23.0) == Catch::Approx(0.19952623).epsilon(1e-6));
  CHECK_THROWS_AS(watt_to_dbm(0.0), std::domain_error);
  CHECK_THROWS_AS(watt_to_dbm(-2.0), std::domain_error);
}

TEST_CASE("dbm/watt round trip") {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    const double dbm = rng.uniform(-120.0, 50.0);
    CHECK(watt_to_dbm(dbm_to_watt(dbm)) == Catch::Approx(dbm).margin(1e-10));
    const double w = dbm_to_watt(rng.uniform(-100.0, 30.0));
    CHECK(dbm_to_watt(watt_to_dbm(w)) == Catch::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("noise power") {
  CHECK(noise_power(-174.0, 180e3) == Catch::Approx(7.1659e-16).epsilon(1e-4));
  CHECK(noise_power(0.0, 1.0) == Catch::Approx(1e-3));
  CHECK(noise_power(-174.0, 1.0) == Catch::Approx(3.9811e-21).epsilon(1e-4));
  CHECK_THROWS_AS(noise_power(-174.0, 0.0), std::domain_error);
}

#include <doctest.h>

#include <cmath>
#include <string>

#include "nulltank/errors.hpp"
#include "nulltank/tank.hpp"

using namespace nulltank;

TEST_CASE("tank construction validates its thresholds") {
  const TankState t = TankState::make(25.0, 25.0, 40.0, 0.1);
  CHECK(t.T == 25.0);
  CHECK(t.xt() == doctest::Approx(std::sqrt(50.0)).epsilon(1e-15));

  CHECK_THROWS_AS(TankState::make(25.0, 25.0, 20.0, 0.1), ConfigError);
  CHECK_THROWS_AS(TankState::make(25.0, 25.0, 40.0, 0.0), ConfigError);
  CHECK_THROWS_AS(TankState::make(0.05, 25.0, 40.0, 0.1), ConfigError);
  CHECK_THROWS_AS(TankState::make(41.0, 25.0, 40.0, 0.1), ConfigError);

  try {
    TankState::make(25.0, 0.05, 40.0, 0.1);  // floor above the target
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("floor exceeds target") !=
          std::string::npos);
  }
}

TEST_CASE("storage gate closes above the cap") {
  CHECK(phi_gate(39.9, 40.0) == 1);
  CHECK(phi_gate(40.0, 40.0) == 1);  // inclusive at the cap
  CHECK(phi_gate(40.0001, 40.0) == 0);
}

TEST_CASE("extraction gate follows the sign of the inertia rate") {
  CHECK(gamma_gate(1.5 * Mat::Identity(3, 3)) == 1);
  CHECK(gamma_gate(-1.0 * Mat::Identity(3, 3)) == 0);
  CHECK(gamma_gate(Mat::Zero(3, 3)) == 0);

  Mat mixed = Mat::Zero(3, 3);
  mixed(0, 0) = 1.0;
  mixed(1, 1) = -1.0;
  CHECK_THROWS_AS(gamma_gate(mixed), ConfigError);

  Mat off_diag = Mat::Identity(3, 3);
  off_diag(0, 1) = 0.5;
  CHECK_THROWS_AS(gamma_gate(off_diag), ConfigError);
}

TEST_CASE("one bookkeeping step debits exactly gamma P_M dt") {
  TankState t = TankState::make(25.0, 25.0, 40.0, 0.1);
  t.gamma = 1;
  tank_step(t, 0.0, 0.0, 1.5, 0.002);
  CHECK(t.T == doctest::Approx(24.997).epsilon(1e-15));
  CHECK(t.last_flow == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(t.phi == 1);
  CHECK_FALSE(t.clamped_last);
}

TEST_CASE("inflow above the cap is discarded") {
  TankState t = TankState::make(25.0, 25.0, 40.0, 0.1);
  t.T = 40.5;  // pushed past the cap by a previous forced step
  t.gamma = 1;
  tank_step(t, 5.0, 1.0, 0.5, 0.002);
  CHECK(t.phi == 0);
  CHECK(t.T == doctest::Approx(40.5 - 0.5 * 0.002).epsilon(1e-15));
}

TEST_CASE("depletion clamps at the floor and counts the event") {
  TankState t = TankState::make(0.1005, 25.0, 40.0, 0.1);
  t.gamma = 1;
  tank_step(t, 0.0, 0.0, 10.0, 0.002);  // would fall to 0.0805
  CHECK(t.T == 0.1);
  CHECK(t.clamp_count == 1);
  CHECK(t.clamped_last);

  tank_step(t, 0.0, 0.0, 0.0, 0.002);
  CHECK_FALSE(t.clamped_last);
  CHECK(t.clamp_count == 1);
}

TEST_CASE("forced storage gate bypasses the cap logic") {
  TankState t = TankState::make(25.0, 25.0, 40.0, 0.1);
  t.T = 41.0;
  t.gamma = 0;
  tank_step(t, 2.0, 0.0, 0.0, 0.002, 1);
  CHECK(t.phi == 1);
  CHECK(t.T == doctest::Approx(41.0 + 2.0 * 0.002).epsilon(1e-15));
}

TEST_CASE("refill need is strict") {
  TankState t = TankState::make(25.0, 25.0, 40.0, 0.1);
  CHECK_FALSE(needs_refill(t));
  t.T = 25.0 - 1e-9;
  CHECK(needs_refill(t));
}

TEST_CASE("bookkeeping preconditions are enforced") {
  TankState t = TankState::make(25.0, 25.0, 40.0, 0.1);
  CHECK_THROWS_AS(tank_step(t, 0.0, 0.0, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(tank_step(t, -1.0, 0.0, 0.0, 0.002), ConfigError);
  CHECK_THROWS_AS(tank_step(t, 0.0, -1.0, 0.0, 0.002), ConfigError);
}

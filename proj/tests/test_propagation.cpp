#include <cmath>
#include <limits>
#include <numeric>

#include "blequiz/propagation.hpp"
#include "doctest.h"

using namespace blequiz;

namespace {

RoomModel quiet_room(double w = 6.0, double d = 6.0) {
  PropagationParams p;
  p.noise_sigma = 0.0;
  return RoomModel::make(w, d, p);
}

}  // namespace

TEST_CASE("rssi_at reference values") {
  RoomModel room = quiet_room(20.0, 20.0);
  Rng rng(1);
  // Beacon 0 sits at (0,0).
  CHECK(rssi_at(room, 0, {1.0, 0.0}, rng) == doctest::Approx(-59.0).epsilon(1e-12));
  CHECK(rssi_at(room, 0, {6.0, 8.0}, rng) == doctest::Approx(-79.0).epsilon(1e-12));

  // -59 - 20 log10(2), evaluated to 40 digits with mpmath:
  // -65.02059991327962390427...
  const double frozen = -65.02059991327962;
  const double got = rssi_at(room, 0, {2.0, 0.0}, rng);
  CHECK(std::abs(got - frozen) < 1e-12);
  CHECK(std::abs(got - (-65.0206)) < 1e-3);

  // Independent route: natural logs in long double.
  const long double alt = -59.0L - 20.0L * (std::log(2.0L) / std::log(10.0L));
  CHECK(std::abs(got - static_cast<double>(alt)) < 1e-12);
}

TEST_CASE("rssi_at errors") {
  RoomModel room = quiet_room();
  Rng rng(1);
  CHECK_THROWS_AS(rssi_at(room, 4, {1.0, 1.0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(rssi_at(room, -1, {1.0, 1.0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(rssi_at(room, 0, {-0.1, 1.0}, rng), std::invalid_argument);
  CHECK_THROWS_AS(rssi_at(room, 0, {1.0, 6.5}, rng), std::invalid_argument);
}

TEST_CASE("clamp at the beacon gives the d_min value, never inf or NaN") {
  RoomModel room = quiet_room();
  Rng rng(3);
  for (int k = 0; k < kCornerCount; ++k) {
    const double v = rssi_at(room, k, room.corner(k), rng);
    CHECK(std::isfinite(v));
    CHECK(v == doctest::Approx(-59.0 - 20.0 * std::log10(0.1)));
  }
}

TEST_CASE("noise-free attenuation is strictly monotone beyond d_min") {
  RoomModel room = quiet_room(50.0, 50.0);
  Rng rng(9);
  double prev = std::numeric_limits<double>::infinity();
  for (double d = 0.11; d < 50.0; d *= 1.07) {
    const double v = rssi_at(room, 0, {d, 0.0}, rng);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("noise statistics") {
  RoomModel room = RoomModel::make(6.0, 6.0);  // sigma 2 dB
  const double sigma = room.propagation.noise_sigma;
  const Point2 at{2.0, 3.0};
  const double clean = noise_free_rssi(room, 1, at);
  Rng rng(20240615);
  constexpr int kN = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double e = rssi_at(room, 1, at, rng) - clean;
    sum += e;
    sumsq += e * e;
  }
  const double mean = sum / kN;
  const double sd = std::sqrt((sumsq - kN * mean * mean) / (kN - 1));
  CHECK(std::abs(mean) < 4.0 * sigma / std::sqrt(double(kN)));
  CHECK(std::abs(sd - sigma) < 0.05 * sigma);
}

TEST_CASE("advance schedules one sample per beacon per interval") {
  BeaconSimulator sim(quiet_room(), 5);
  const auto path = PlayerPath::stationary({1.0, 2.0});

  CHECK(sim.advance(0, path).empty());

  const auto samples = sim.advance(1000, path);
  REQUIRE(samples.size() == 40);
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const auto& a = samples[i - 1];
    const auto& b = samples[i];
    CHECK((a.ts_ms < b.ts_ms || (a.ts_ms == b.ts_ms && a.beacon_id < b.beacon_id)));
  }
  CHECK(samples.front().ts_ms == 100);
  CHECK(samples.back().ts_ms == 1000);
  for (const auto& s : samples) CHECK(s.uuid == sim.room().beacons[s.beacon_id].uuid);

  CHECK_THROWS_AS(sim.advance(999, path), std::invalid_argument);
  CHECK(sim.advance(1000, path).empty());
}

TEST_CASE("per-beacon interval override") {
  RoomModel room = quiet_room();
  room.beacons[2].advertise_interval_ms = 250;
  BeaconSimulator sim(room, 5);
  const auto samples = sim.advance(1000, PlayerPath::stationary(room.center()));
  std::array<int, 4> per{};
  for (const auto& s : samples) ++per[s.beacon_id];
  CHECK(per == std::array<int, 4>{10, 10, 4, 10});
}

TEST_CASE("room center in a square room hears all beacons equally") {
  BeaconSimulator sim(quiet_room(), 5);
  const auto samples = sim.advance(500, PlayerPath::stationary({3.0, 3.0}));
  REQUIRE(samples.size() == 20);
  for (std::size_t i = 0; i < samples.size(); i += 4) {
    for (int k = 1; k < 4; ++k) CHECK(samples[i + k].rssi_dbm == samples[i].rssi_dbm);
  }
}

TEST_CASE("simulator determinism") {
  const RoomModel room = RoomModel::make(8.0, 5.0);
  const auto path = PlayerPath::walk({{4.0, 2.5}, {0.5, 0.5}, {7.5, 4.5}}, 1.0);
  BeaconSimulator a(room, 77), b(room, 77), c(room, 78);
  const auto sa = a.advance(12000, path);
  const auto sb = b.advance(12000, path);
  const auto sc = c.advance(12000, path);
  CHECK(sa == sb);
  CHECK(sa != sc);
}

TEST_CASE("player path interpolates linearly") {
  const auto path = PlayerPath::walk({{0.0, 0.0}, {3.0, 4.0}}, 1.0, 1000);
  CHECK(path.end_ms() == 6000);
  CHECK(path.position_at(0) == Point2{0.0, 0.0});
  const Point2 mid = path.position_at(3500);
  CHECK(mid.x == doctest::Approx(1.5));
  CHECK(mid.y == doctest::Approx(2.0));
  CHECK(path.position_at(9000) == Point2{3.0, 4.0});
  PlayerPath p;
  p.add(10, {});
  CHECK_THROWS(p.add(5, {}));
}

TEST_CASE("room validation") {
  CHECK_NOTHROW(RoomModel::make(2.0, 50.0).validate());
  CHECK_THROWS_AS(RoomModel::make(1.5, 6.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(RoomModel::make(6.0, 60.0).validate(), std::invalid_argument);

  RoomModel dup = RoomModel::make(6.0, 6.0);
  dup.beacons[3].uuid = dup.beacons[0].uuid;
  CHECK_THROWS_AS(dup.validate(), std::invalid_argument);

  RoomModel moved = RoomModel::make(6.0, 6.0);
  moved.beacons[1].position = {5.0, 0.0};
  CHECK_THROWS_AS(moved.validate(), std::invalid_argument);

  RoomModel zero = RoomModel::make(6.0, 6.0);
  zero.beacons[1].advertise_interval_ms = 0;
  CHECK_THROWS_AS(zero.validate(), std::invalid_argument);

  CHECK(is_canonical_uuid("E2C56DB5-DFFB-48D2-B060-D0F5A71096E0"));
  CHECK_FALSE(is_canonical_uuid("e2c56db5dffb48d2b060d0f5a71096e0"));
  CHECK_FALSE(is_canonical_uuid("e2c56db5-dffb-48d2-b060-d0f5a71096eg"));
}

TEST_CASE("corner layout: NW, NE, SW, SE") {
  const RoomModel room = RoomModel::make(8.0, 4.0);
  CHECK(room.corner(0) == Point2{0.0, 0.0});
  CHECK(room.corner(1) == Point2{8.0, 0.0});
  CHECK(room.corner(2) == Point2{0.0, 4.0});
  CHECK(room.corner(3) == Point2{8.0, 4.0});
  CHECK(room.corner_styles[0].color == "blue");
  CHECK(room.corner_styles[3].number == 4);
}

#include <cmath>
#include <random>
#include <vector>

#include "blequiz/pipeline.hpp"
#include "doctest.h"

using namespace blequiz;

namespace {

RssiSample sample(int id, TimestampMs ts, double rssi) { return {ts, id, default_beacon_uuid(id), rssi}; }

SignalPipeline make_pipeline() { return SignalPipeline::for_room(RoomModel::make(6.0, 6.0)); }

// Independent oracle: mean of the last min(k, w) values.
double tail_mean(const std::vector<double>& xs, std::size_t w) {
  const std::size_t n = std::min(xs.size(), w);
  long double sum = 0.0L;
  for (std::size_t i = xs.size() - n; i < xs.size(); ++i) sum += xs[i];
  return static_cast<double>(sum / n);
}

}  // namespace

TEST_CASE("push_sample examples") {
  auto p = make_pipeline();

  SUBCASE("first push") {
    auto s = p.push_sample(sample(0, 0, -60.0));
    REQUIRE(s);
    CHECK(s->mean_rssi == -60.0);
    CHECK(s->sample_count == 1);
  }

  SUBCASE("ten values -50..-59") {
    std::optional<FilteredSignal> s;
    int sum = 0;
    for (int i = 0; i < 10; ++i) {
      s = p.push_sample(sample(1, i * 100, -50.0 - i));
      sum += -50 - i;
    }
    CHECK(s->mean_rssi == doctest::Approx(sum / 10.0));
    CHECK(s->mean_rssi == doctest::Approx(-54.5));
    CHECK(s->sample_count == 10);
  }

  SUBCASE("full window of -60 then -70 evicts one -60") {
    for (int i = 0; i < 10; ++i) p.push_sample(sample(2, i, -60.0));
    auto s = p.push_sample(sample(2, 10, -70.0));
    CHECK(s->mean_rssi == doctest::Approx((9 * -60.0 + -70.0) / 10.0));
    CHECK(s->mean_rssi == doctest::Approx(-61.0));
    CHECK(s->sample_count == 10);
  }
}

TEST_CASE("rejections are counted, not fatal") {
  auto p = make_pipeline();
  CHECK(p.push_sample(sample(0, 100, -60.0)));
  CHECK_FALSE(p.push_sample({100, 0, default_beacon_uuid(1), -60.0}));  // uuid of another beacon
  CHECK_FALSE(p.push_sample({100, 0, "00000000-0000-0000-0000-000000000000", -60.0}));
  CHECK_FALSE(p.push_sample({100, 7, default_beacon_uuid(0), -60.0}));
  CHECK_FALSE(p.push_sample(sample(0, 50, -60.0)));  // went back in time
  CHECK(p.push_sample(sample(0, 100, -61.0)));       // equal timestamp is fine
  CHECK(p.push_sample(sample(1, 10, -61.0)));        // other beacon has its own clock

  const auto& c = p.counters();
  CHECK(c.accepted == 3);
  CHECK(c.unknown_beacon == 3);
  CHECK(c.out_of_order == 1);
  CHECK(p.signal(0).sample_count == 2);
}

TEST_CASE("uuid match ignores case") {
  auto p = make_pipeline();
  std::string upper = default_beacon_uuid(3);
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  CHECK(p.push_sample({1, 3, upper, -60.0}));
}

TEST_CASE("windows are independent per beacon") {
  auto p = make_pipeline();
  for (int i = 0; i < 5; ++i) p.push_sample(sample(0, i, -40.0));
  for (int i = 0; i < 50; ++i) p.push_sample(sample(1, i, -80.0));
  CHECK(p.signal(0).sample_count == 5);
  CHECK(p.signal(0).mean_rssi == -40.0);
  CHECK(p.signal(1).sample_count == 10);
}

TEST_CASE("reset") {
  auto p = make_pipeline();
  for (int i = 0; i < 12; ++i) p.push_sample(sample(i % 4, 1000 + i, -60.0 - i));
  p.push_sample(sample(0, 0, -60.0));  // out of order
  p.reset();
  for (int k = 0; k < 4; ++k) CHECK(p.signal(k).sample_count == 0);
  CHECK(p.counters() == PipelineCounters{});
  p.reset();
  CHECK(p.counters() == PipelineCounters{});

  // Behaves like a first push, including an earlier timestamp.
  auto s = p.push_sample(sample(0, 5, -42.0));
  REQUIRE(s);
  CHECK(s->sample_count == 1);
  CHECK(s->mean_rssi == -42.0);
}

TEST_CASE("property: mean equals brute-force tail mean, window bounded") {
  std::mt19937_64 rng(0xF117E5);
  std::uniform_int_distribution<int> beacon(0, 3);
  std::uniform_int_distribution<int> len(0, 100);
  std::uniform_real_distribution<double> rssi(-100.0, -20.0);
  for (int trial = 0; trial < 300; ++trial) {
    auto p = make_pipeline();
    std::array<std::vector<double>, 4> history;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) {
      const int k = beacon(rng);
      const double v = rssi(rng);
      history[k].push_back(v);
      auto s = p.push_sample(sample(k, i, v));
      REQUIRE(s);
      CHECK(p.filter(k).size() <= 10);
      const double want = tail_mean(history[k], 10);
      CHECK(std::abs(s->mean_rssi - want) <= 1e-9 * std::abs(want));
      CHECK(s->sample_count == std::min<std::size_t>(history[k].size(), 10));
    }
  }
}

TEST_CASE("custom window size") {
  SignalPipeline p = SignalPipeline::for_room(RoomModel::make(6.0, 6.0), 3);
  for (int i = 0; i < 5; ++i) p.push_sample(sample(0, i, -60.0 - i));
  CHECK(p.signal(0).sample_count == 3);
  CHECK(p.signal(0).mean_rssi == doctest::Approx(-63.0));
  CHECK(p.signal(0).confidence() == 1.0);
  CHECK_THROWS_AS(FilterState(0, 0), std::invalid_argument);
}

TEST_CASE("estimate_distance examples") {
  PropagationParams params;  // n = 2, d_min 0.1
  FilteredSignal s{0, -59.0, 10, 10, 0};
  CHECK(estimate_distance(s, params, -59.0).distance == doctest::Approx(1.0));
  s.mean_rssi = -79.0;
  CHECK(estimate_distance(s, params, -59.0).distance == doctest::Approx(10.0));
  s.mean_rssi = -65.0206;
  CHECK(std::abs(estimate_distance(s, params, -59.0).distance - 2.0) < 1e-3);

  // Inverse of the forward model's value at 2 m.
  s.mean_rssi = path_loss_rssi(2.0, -59.0, params);
  CHECK(std::abs(estimate_distance(s, params, -59.0).distance - 2.0) < 1e-12);
}

TEST_CASE("estimate_distance clamps and reports confidence") {
  PropagationParams params;
  FilteredSignal s{2, -10.0, 4, 10, 0};
  auto e = estimate_distance(s, params, -59.0);
  CHECK(e.distance == params.d_min);
  CHECK(e.confidence == doctest::Approx(0.4));
  CHECK(e.beacon_id == 2);
  s.mean_rssi = -200.0;
  CHECK(estimate_distance(s, params, -59.0).distance == kDefaultMaxDistance);
  s.sample_count = 0;
  CHECK_THROWS_AS(estimate_distance(s, params, -59.0), NoDataError);
}

TEST_CASE("estimate_distance is non-increasing in mean rssi") {
  PropagationParams params;
  params.path_loss_exponent = 2.7;
  double prev = std::numeric_limits<double>::infinity();
  for (double r = -130.0; r <= 0.0; r += 0.37) {
    const double d = estimate_distance({0, r, 10, 10, 0}, params, -59.0).distance;
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("round trip with the forward model across the clamp range") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> dist(0.1, 50.0), n(1.6, 4.0), tx(-70.0, -50.0);
  for (int i = 0; i < 2000; ++i) {
    PropagationParams params;
    params.path_loss_exponent = n(rng);
    const double d = dist(rng), t = tx(rng);
    const double r = path_loss_rssi(d, t, params);
    const double back = estimate_distance({0, r, 10, 10, 0}, params, t).distance;
    CHECK(std::abs(back - d) <= 1e-9 * d);
  }
}

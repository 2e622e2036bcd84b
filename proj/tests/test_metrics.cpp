#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "coexsim/metrics/aggregator.hpp"
#include "coexsim/metrics/jfi.hpp"
#include "coexsim/sim/rng.hpp"

using namespace coexsim;

namespace {

sim::Transmission make_tx(std::int32_t node, sim::Tick start, sim::Tick end, bool rs = false,
                          bool collided = false) {
  return sim::Transmission{node, start, end, rs, collided};
}

}  // namespace

TEST_CASE("fairness index closed-form values") {
  const std::array<double, 2> equal{5.0, 5.0};
  CHECK(metrics::jain_fairness_index(equal) == doctest::Approx(1.0).epsilon(1e-15));

  const std::array<double, 2> starved{1.0, 0.0};
  CHECK(metrics::jain_fairness_index(starved) == doctest::Approx(0.5).epsilon(1e-15));

  const std::array<double, 2> skewed{3.0, 1.0};
  // (3+1)^2 / (2*(9+1)) = 16/20
  CHECK(metrics::jain_fairness_index(skewed) == doctest::Approx(0.8).epsilon(1e-15));

  const std::array<double, 3> zeros{0.0, 0.0, 0.0};
  CHECK(metrics::jain_fairness_index(zeros) == 1.0);

  CHECK_THROWS_AS(metrics::jain_fairness_index({}), std::invalid_argument);
}

TEST_CASE("fairness index scale invariance and bounds on random allocations") {
  sim::RngStream rng(2024, 7);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.next_below_inclusive(7);
    std::vector<double> x(n);
    bool any = false;
    for (auto& v : x) {
      v = rng.next_unit() * 100.0;
      if (v > 0.0) any = true;
    }
    if (!any) x[0] = 1.0;

    const double j = metrics::jain_fairness_index(x);
    CHECK(j >= 1.0 / static_cast<double>(n) - 1e-12);
    CHECK(j <= 1.0 + 1e-12);

    const double scale = 0.001 + rng.next_unit() * 1000.0;
    std::vector<double> scaled(x);
    for (auto& v : scaled) v *= scale;
    CHECK(std::abs(metrics::jain_fairness_index(scaled) - j) <= 1e-12);

    // Independent recomputation straight from the definition.
    double s = 0.0, ss = 0.0;
    for (double v : x) {
      s += v;
      ss += v * v;
    }
    CHECK(j == doctest::Approx(s * s / (static_cast<double>(n) * ss)).epsilon(1e-14));
  }
}

TEST_CASE("airtime ledger accumulates per-network successful airtime") {
  metrics::AirtimeLedger ledger;
  CHECK(ledger.jfi_network_pair() == 1.0);  // nothing allocated yet

  ledger.record_attempt(mac::Technology::NRU, make_tx(0, 0, 500), sim::TxOutcome::Success);
  CHECK(ledger.success_ticks(mac::Technology::NRU) == 500);
  CHECK(ledger.success_ticks(mac::Technology::WiFi) == 0);
  CHECK(ledger.jfi_network_pair() == doctest::Approx(0.5));

  ledger.record_attempt(mac::Technology::WiFi, make_tx(1, 600, 1100), sim::TxOutcome::Success);
  CHECK(ledger.jfi_network_pair() == doctest::Approx(1.0));

  // Collisions count attempts but award no airtime.
  ledger.record_attempt(mac::Technology::WiFi, make_tx(1, 1200, 1700), sim::TxOutcome::Collision);
  CHECK(ledger.success_ticks(mac::Technology::WiFi) == 500);
  CHECK(ledger.attempts() == 3);
  CHECK(ledger.collisions() == 1);
}

TEST_CASE("airtime partition matches a per-tick sweep oracle and conserves the horizon") {
  sim::RngStream rng(99, 3);
  for (int scenario = 0; scenario < 50; ++scenario) {
    const sim::Tick horizon = 500 + rng.next_below_inclusive(1500);
    metrics::AirtimeLedger ledger;

    // rank: 0 idle, 1 reservation, 2 success, 3 collision
    std::vector<int> rank(static_cast<std::size_t>(horizon), 0);
    auto paint = [&](sim::Tick s, sim::Tick e, int r) {
      for (sim::Tick t = s; t < e && t < horizon; ++t) {
        rank[static_cast<std::size_t>(t)] = std::max(rank[static_cast<std::size_t>(t)], r);
      }
    };

    const int n_intervals = 10 + static_cast<int>(rng.next_below_inclusive(50));
    for (int i = 0; i < n_intervals; ++i) {
      const sim::Tick start = rng.next_below_inclusive(horizon + 200);  // may poke past horizon
      const sim::Tick len = 1 + rng.next_below_inclusive(400);
      const auto kind = rng.next_below_inclusive(3);
      const auto tx = make_tx(static_cast<std::int32_t>(i % 5), start, start + len);
      switch (kind) {
        case 0:
          ledger.record_reservation(make_tx(0, start, start + len, true));
          paint(start, start + len, 1);
          break;
        case 1:
          ledger.record_attempt(mac::Technology::NRU, tx, sim::TxOutcome::Success);
          paint(start, start + len, 2);
          break;
        default:
          ledger.record_attempt(mac::Technology::WiFi, tx, sim::TxOutcome::Collision);
          paint(start, start + len, 3);
          break;
      }
    }

    // A couple of transmissions still in flight at the horizon.
    std::vector<sim::Transmission> in_flight;
    const int n_open = static_cast<int>(rng.next_below_inclusive(2));
    for (int i = 0; i < n_open; ++i) {
      const sim::Tick start = horizon - 1 - rng.next_below_inclusive(horizon - 1);
      const sim::Tick end = horizon + 1 + rng.next_below_inclusive(300);
      const bool rs = rng.next_below_inclusive(1) == 1;
      const bool collided = !rs && rng.next_below_inclusive(1) == 1;
      in_flight.push_back(make_tx(10 + i, start, end, rs, collided));
      paint(start, end, rs ? 1 : (collided ? 3 : 2));
    }

    const auto part = ledger.partition(horizon, in_flight);
    metrics::AirtimePartition oracle;
    for (int r : rank) {
      if (r == 0) ++oracle.idle_ticks;
      else if (r == 1) ++oracle.rs_ticks;
      else if (r == 2) ++oracle.success_ticks;
      else ++oracle.collision_ticks;
    }
    CHECK(part.idle_ticks == oracle.idle_ticks);
    CHECK(part.rs_ticks == oracle.rs_ticks);
    CHECK(part.success_ticks == oracle.success_ticks);
    CHECK(part.collision_ticks == oracle.collision_ticks);
    CHECK(part.total() == static_cast<std::uint64_t>(horizon));
  }
}

TEST_CASE("step aggregator: delay carry-forward, trend, and running mean") {
  metrics::StepAggregator agg(10, false);
  const sim::Tick step = 2500;

  // Step 0: two PC1 deliveries, delays 600 and 800.
  agg.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 900, 1400),
                 sim::TxOutcome::Success, 800, 0);
  agg.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 1600, 2100),
                 sim::TxOutcome::Success, 1300, 0);
  auto m0 = agg.finish_step(step);
  CHECK(m0.step_index == 0);
  CHECK(m0.step_delay_us == doctest::Approx(700.0));
  CHECK(m0.avg_delay_us == doctest::Approx(700.0));
  CHECK(m0.delay_trend_us == 0.0);  // no previous step

  // Step 1: nothing completes; the step delay carries forward, trend is flat.
  auto m1 = agg.finish_step(2 * step);
  CHECK(m1.step_delay_us == doctest::Approx(700.0));
  CHECK(m1.avg_delay_us == doctest::Approx(700.0));
  CHECK(m1.delay_trend_us == doctest::Approx(0.0));

  // Step 2: one slow delivery; trend is the step-over-step difference.
  agg.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 6000, 6500),
                 sim::TxOutcome::Success, 5200, 0);
  auto m2 = agg.finish_step(3 * step);
  CHECK(m2.step_delay_us == doctest::Approx(1300.0));
  CHECK(m2.avg_delay_us == doctest::Approx((600.0 + 800.0 + 1300.0) / 3.0));
  CHECK(m2.delay_trend_us == doctest::Approx(600.0));

  // Running mean always equals the mean of the recorded delay log.
  double sum = 0.0;
  for (const auto& rec : agg.pc1_delays()) sum += static_cast<double>(rec.delay());
  CHECK(m2.avg_delay_us ==
        doctest::Approx(sum / static_cast<double>(agg.pc1_delays().size())));
  CHECK(agg.pc1_delays().size() == 3);
}

TEST_CASE("step aggregator: collision fraction covers exactly the last ten steps") {
  metrics::StepAggregator agg(10, false);
  const sim::Tick step = 2500;

  // Steps 0-1: all collisions. Steps 2-11: all successes.
  for (int s = 0; s < 12; ++s) {
    const sim::Tick base = static_cast<sim::Tick>(s) * step;
    const auto outcome = s < 2 ? sim::TxOutcome::Collision : sim::TxOutcome::Success;
    agg.on_attempt(mac::ClassTag::PC3, mac::Technology::WiFi, make_tx(1, base, base + 500),
                   outcome, base, 1);
    const auto m = agg.finish_step(base + step);
    if (s == 0 || s == 1) {
      CHECK(m.collision_frac_window == doctest::Approx(1.0));
    } else if (s <= 9) {
      // Window spans steps 0..s and still holds both collisions.
      CHECK(m.collision_frac_window == doctest::Approx(2.0 / static_cast<double>(s + 1)));
    } else if (s == 10) {
      // Step 0 evicted; only step 1's collision remains in steps 1..10.
      CHECK(m.collision_frac_window == doctest::Approx(0.1));
    } else {
      // Step 11: window is steps 2..11, all successes.
      CHECK(m.collision_frac_window == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("step aggregator: boundary completion lands in the step that ends there") {
  metrics::StepAggregator agg(10, false);
  agg.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 2000, 2500),
                 sim::TxOutcome::Success, 1900, 0);
  const auto m0 = agg.finish_step(2500);
  CHECK(m0.step_delay_us == doctest::Approx(600.0));
  const auto m1 = agg.finish_step(5000);
  CHECK(m1.avg_delay_us == doctest::Approx(600.0));
  CHECK(agg.pc1_delays().size() == 1);
}

TEST_CASE("step aggregator: airtime fractions are cumulative shares of elapsed time") {
  metrics::StepAggregator agg(10, false);
  agg.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 0, 500),
                 sim::TxOutcome::Success, 0, 0);
  agg.on_attempt(mac::ClassTag::PC3, mac::Technology::WiFi, make_tx(1, 500, 1500),
                 sim::TxOutcome::Success, 0, 1);
  const auto m = agg.finish_step(2500);
  CHECK(m.airtime_frac_nru == doctest::Approx(500.0 / 2500.0));
  CHECK(m.airtime_frac_wifi == doctest::Approx(1000.0 / 2500.0));

  const auto m1 = agg.finish_step(5000);
  CHECK(m1.airtime_frac_nru == doctest::Approx(500.0 / 5000.0));
  CHECK(m1.airtime_frac_wifi == doctest::Approx(1000.0 / 5000.0));
}

TEST_CASE("step aggregator: cumulative vs per-step fairness flag") {
  // Cumulative: step 1 fairness reflects all airtime so far.
  metrics::StepAggregator cumulative(10, false);
  cumulative.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 0, 500),
                        sim::TxOutcome::Success, 0, 0);
  cumulative.finish_step(2500);
  cumulative.on_attempt(mac::ClassTag::PC3, mac::Technology::WiFi, make_tx(1, 2500, 3000),
                        sim::TxOutcome::Success, 0, 1);
  const auto mc = cumulative.finish_step(5000);
  CHECK(mc.jfi == doctest::Approx(1.0));  // 500 vs 500 overall

  // Per-step: step 1 fairness sees only that step's airtime (0 vs 500).
  metrics::StepAggregator per_step(10, true);
  per_step.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 0, 500),
                      sim::TxOutcome::Success, 0, 0);
  const auto p0 = per_step.finish_step(2500);
  CHECK(p0.jfi == doctest::Approx(0.5));
  per_step.on_attempt(mac::ClassTag::PC3, mac::Technology::WiFi, make_tx(1, 2500, 3000),
                      sim::TxOutcome::Success, 0, 1);
  const auto p1 = per_step.finish_step(5000);
  CHECK(p1.jfi == doctest::Approx(0.5));
}

TEST_CASE("step aggregator: only high-priority successes feed the delay log") {
  metrics::StepAggregator agg(10, false);
  agg.on_attempt(mac::ClassTag::PC3, mac::Technology::WiFi, make_tx(1, 0, 500),
                 sim::TxOutcome::Success, 0, 1);
  agg.on_attempt(mac::ClassTag::PC1, mac::Technology::NRU, make_tx(0, 600, 1100),
                 sim::TxOutcome::Collision, 100, 0);
  const auto m = agg.finish_step(2500);
  CHECK(agg.pc1_delays().empty());
  CHECK(m.step_delay_us == 0.0);  // nothing delivered, nothing to carry
  CHECK(m.avg_delay_us == 0.0);
}

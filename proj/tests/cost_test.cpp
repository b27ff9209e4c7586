#include "gbrtune/cost.hpp"
#include "gbrtune/errors.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace gbrtune;

namespace {

using Series = std::vector<double>;

// Direct transcription of the cost definition, one flag pair per sample.
double cost_oracle(const Series& a, const Series& gbr, double p_u, double p_o) {
  long double total = 0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const int fu = gbr[t] > a[t] ? 1 : 0;
    const int fo = a[t] > gbr[t] ? 1 : 0;
    total += fu * static_cast<long double>(gbr[t] - a[t]) * p_u;
    total += fo * static_cast<long double>(a[t] - gbr[t]) * p_o;
  }
  return static_cast<double>(total);
}

std::pair<Series, Series> random_series(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> v(0.0, 1e7);
  Series a(n);
  Series g(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = v(rng);
    g[i] = (rng() % 5 == 0) ? a[i] : v(rng);
  }
  return {a, g};
}

} // namespace

TEST(SubscriptionFlags, Direct) {
  EXPECT_EQ(subscription_flags(10, 12), (SubscriptionFlags{1, 0}));
  EXPECT_EQ(subscription_flags(12, 10), (SubscriptionFlags{0, 1}));
  EXPECT_EQ(subscription_flags(7, 7), (SubscriptionFlags{0, 0}));
  EXPECT_THROW(subscription_flags(std::numeric_limits<double>::quiet_NaN(), 1), ValidationError);
  EXPECT_THROW(subscription_flags(1, std::numeric_limits<double>::infinity()), ValidationError);
  EXPECT_THROW(subscription_flags(-1, 1), ValidationError);
}

TEST(SubscriptionFlags, NeverBothSet) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> small(0, 20);
  for (int i = 0; i < 100000; ++i) {
    const auto f = subscription_flags(small(rng), small(rng));
    EXPECT_EQ(f.under * f.over, 0);
  }
}

TEST(TotalCost, HandValue) {
  EXPECT_NEAR(total_cost(Series{10, 10}, Series{12, 8}, {0.1, 30}), 60.2, 1e-9);
}

TEST(TotalCost, ExactPredictionIsFree) {
  const Series a{1, 5, 0, 3.25};
  EXPECT_EQ(total_cost(a, a, {}), 0.0);
}

TEST(TotalCost, Errors) {
  EXPECT_THROW(total_cost(Series{1}, Series{1, 2}, {}), ValidationError);
  EXPECT_THROW(total_cost(Series{}, Series{}, {}), ValidationError);
  EXPECT_THROW(total_cost(Series{1}, Series{1}, {-1, 1}), ValidationError);
}

TEST(TotalCost, MatchesOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    auto [a, g] = random_series(rng, 1 + rng() % 500);
    const CostParams p{0.1 + (rng() % 10), 1.0 + (rng() % 50)};
    const double expected = cost_oracle(a, g, p.p_u, p.p_o);
    EXPECT_NEAR(total_cost(a, g, p), expected, 1e-9 * std::max(1.0, expected));
  }
}

TEST(TotalCost, NonNegativeAndZeroOnlyWhenExact) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    auto [a, g] = random_series(rng, 1 + rng() % 50);
    const double c = total_cost(a, g, {});
    EXPECT_GE(c, 0.0);
    EXPECT_EQ(c == 0.0, a == g);
  }
}

TEST(TotalCost, Monotonicity) {
  const CostParams p{0.1, 30};
  // Raising an oversubscribed GBR toward the actual lowers the cost.
  EXPECT_LT(total_cost(Series{10}, Series{9}, p), total_cost(Series{10}, Series{8}, p));
  EXPECT_LT(total_cost(Series{10}, Series{10}, p), total_cost(Series{10}, Series{9.5}, p));
  // Raising an exactly-met GBR above the actual raises it.
  EXPECT_GT(total_cost(Series{10}, Series{10.5}, p), total_cost(Series{10}, Series{10}, p));
}

TEST(TotalCost, ScalesLinearly) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto [a, g] = random_series(rng, 1 + rng() % 100);
    const double k = 0.5 + static_cast<double>(rng() % 100) / 10.0;
    Series ka(a);
    Series kg(g);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ka[i] *= k;
      kg[i] *= k;
    }
    const double base = total_cost(a, g, {});
    EXPECT_NEAR(total_cost(ka, kg, {}), k * base, 1e-9 * std::max(1.0, k * base));
  }
}

TEST(SubscriptionMetrics, HandValues) {
  const auto m = subscription_metrics(Series{10, 10}, Series{12, 8}, {0.1, 30});
  EXPECT_EQ(m.over_magnitude, 2);
  EXPECT_EQ(m.over_count, 1u);
  EXPECT_EQ(m.under_magnitude, 2);
  EXPECT_EQ(m.under_count, 1u);
  EXPECT_EQ(m.over_fraction, 0.5);
  EXPECT_EQ(m.under_fraction, 0.5);
  EXPECT_EQ(m.reserved_total, 20);
  EXPECT_EQ(m.actual_total, 20);
  EXPECT_NEAR(m.total_cost, 60.2, 1e-12);
}

TEST(SubscriptionMetrics, OverReservationNeverOversubscribes) {
  const auto m = subscription_metrics(Series{1, 2, 3}, Series{3, 3, 3}, {});
  EXPECT_EQ(m.over_count, 0u);
  EXPECT_EQ(m.over_magnitude, 0.0);
  EXPECT_EQ(m.under_count, 2u);
}

TEST(SubscriptionMetrics, InvariantsOnRandomSeries) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto [a, g] = random_series(rng, 1 + rng() % 300);
    const CostParams p{0.1, 30};
    const auto m = subscription_metrics(a, g, p);
    EXPECT_LE(m.over_count + m.under_count, a.size());
    EXPECT_NEAR(m.total_cost, p.p_u * m.under_magnitude + p.p_o * m.over_magnitude,
                1e-12 * std::max(1.0, m.total_cost));
    const double direct = total_cost(a, g, p);
    EXPECT_NEAR(m.total_cost, direct, 1e-9 * std::max(1.0, direct));

    // Streaming accumulation gives bit-identical results to the batch call.
    SubscriptionAccumulator acc;
    for (std::size_t i = 0; i < a.size(); ++i)
      acc.add(a[i], g[i]);
    const auto s = acc.finish(p);
    EXPECT_EQ(s.total_cost, m.total_cost);
    EXPECT_EQ(s.over_magnitude, m.over_magnitude);
    EXPECT_EQ(s.under_magnitude, m.under_magnitude);
  }
}

TEST(ClassicMetrics, PerfectForecast) {
  const Series a{1, 3, 2, 2, 5};
  const auto m = classic_metrics(a, a);
  EXPECT_EQ(m.mae, 0);
  EXPECT_EQ(m.mse, 0);
  EXPECT_EQ(m.rmse, 0);
  EXPECT_EQ(m.mape, 0);
  EXPECT_EQ(m.mda, 1);
}

TEST(ClassicMetrics, HandArithmetic) {
  const auto m = classic_metrics(Series{1, 2}, Series{2, 4});
  EXPECT_EQ(m.mae, 1.5);
  EXPECT_EQ(m.mse, 2.5);
  EXPECT_EQ(m.rmse, std::sqrt(2.5));
  EXPECT_EQ(m.mape, 1.0);
}

TEST(ClassicMetrics, DirectionalAccuracy) {
  EXPECT_EQ(classic_metrics(Series{1, 2, 1}, Series{1, 3, 0}).mda, 1.0);
  // Steps: up vs down (miss), flat vs flat (hit).
  EXPECT_EQ(classic_metrics(Series{2, 3, 3}, Series{2, 1, 3}).mda, 0.5);
}

TEST(ClassicMetrics, MapeSkipsZeroActuals) {
  const auto m = classic_metrics(Series{0, 2, 4}, Series{1, 3, 2});
  EXPECT_DOUBLE_EQ(m.mape, (0.5 + 0.5) / 2);
}

TEST(ClassicMetrics, Errors) {
  EXPECT_THROW(classic_metrics(Series{1}, Series{1}), ValidationError);
  EXPECT_THROW(classic_metrics(Series{1, 2}, Series{1}), ValidationError);
}

TEST(ClassicMetrics, RmseIsSqrtMse) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto [a, g] = random_series(rng, 2 + rng() % 100);
    const auto m = classic_metrics(a, g);
    EXPECT_EQ(m.rmse, std::sqrt(m.mse));
    EXPECT_GE(m.mda, 0.0);
    EXPECT_LE(m.mda, 1.0);
  }
}

TEST(BandwidthSavings, HandValues) {
  EXPECT_EQ(bandwidth_savings(Series{4, 4, 4}, 4), 0.0);
  EXPECT_EQ(bandwidth_savings(Series{2, 2}, 4), 0.5);
  EXPECT_LT(bandwidth_savings(Series{6}, 4), 0.0);
  EXPECT_THROW(bandwidth_savings(Series{1}, 0), ValidationError);
  EXPECT_THROW(bandwidth_savings(Series{}, 1), ValidationError);
}

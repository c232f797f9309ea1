#include <doctest.h>

#include <algorithm>
#include <random>

#include "gridtrace/studies/demand.hpp"
#include "gridtrace/studies/forecast.hpp"
#include "gridtrace/studies/price.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace gridtrace;
using namespace gridtrace::studies;
using frame::Cell;
using frame::make_date;
using frame::Timestamp;
using test_support::error_code_of;
using test_support::make_frame;

namespace {

baseline::BaselineSeries daily_baseline(frame::Date start, const std::vector<double>& v) {
  baseline::BaselineSeries b;
  b.method = "fixed";
  for (std::size_t i = 0; i < v.size(); ++i) {
    b.timestamps.push_back({frame::add_days(start, static_cast<long>(i)), 0});
    b.values.emplace_back(v[i]);
  }
  return b;
}

baseline::ProbabilisticBaseline tracks_from(frame::Date start, std::size_t days, std::array<double, 5> level) {
  baseline::ProbabilisticBaseline pb;
  for (std::size_t i = 0; i < days; ++i) {
    pb.timestamps.push_back({frame::add_days(start, static_cast<long>(i)), 0});
    for (std::size_t q = 0; q < 5; ++q) pb.tracks[q].push_back(level[q]);
  }
  return pb;
}

}  // namespace

TEST_CASE("peak demand reduction") {
  const auto start = make_date(2020, 4, 1);
  const auto demand = make_frame(start, 30, [](std::size_t, int h) { return h == 18 ? 90.0 : 50.0; });
  CHECK(peak_demand_reduction(demand, daily_baseline(start, std::vector<double>(30, 100.0)), 2020, 4).alpha ==
        doctest::Approx(10.0));
  CHECK(peak_demand_reduction(demand, daily_baseline(start, std::vector<double>(30, 90.0)), 2020, 4).alpha == 0.0);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(50.0, 150.0);
  std::vector<std::array<double, 24>> hours(30);
  std::vector<double> base(30);
  for (std::size_t d = 0; d < 30; ++d) {
    for (auto& v : hours[d]) v = u(rng);
    base[d] = u(rng);
  }
  const auto random_demand = make_frame(start, 30, [&](std::size_t d, int h) { return hours[d][static_cast<std::size_t>(h)]; });
  double oracle = 0.0;
  for (std::size_t d = 0; d < 30; ++d) {
    const double peak = *std::max_element(hours[d].begin(), hours[d].end());
    oracle += (base[d] - peak) / base[d] * 100.0 / 30.0;
  }
  const auto r = peak_demand_reduction(random_demand, daily_baseline(start, base), 2020, 4);
  CHECK(std::abs(r.alpha - oracle) <= 1e-12);
  CHECK(r.days.size() == 30);

  for (double c : {0.001, 3.7, 1e4}) {
    const auto scaled = make_frame(start, 30, [&](std::size_t d, int h) { return c * hours[d][static_cast<std::size_t>(h)]; });
    std::vector<double> sb(base);
    for (auto& v : sb) v *= c;
    CHECK(std::abs(peak_demand_reduction(scaled, daily_baseline(start, sb), 2020, 4).alpha - r.alpha) <= 1e-12);
  }

  // hourly baselines are reduced to daily peaks
  baseline::BaselineSeries hourly;
  for (std::size_t d = 0; d < 30; ++d) {
    for (int h = 0; h < 24; ++h) {
      hourly.timestamps.push_back({frame::add_days(start, static_cast<long>(d)), h});
      hourly.values.emplace_back(h == 5 ? 100.0 : 10.0);
    }
  }
  CHECK(peak_demand_reduction(demand, hourly, 2020, 4).alpha == doctest::Approx(10.0));

  auto zero = std::vector<double>(30, 100.0);
  zero[3] = 0.0;
  CHECK(error_code_of([&] { peak_demand_reduction(demand, daily_baseline(start, zero), 2020, 4); }) == "zero-baseline");
  CHECK(error_code_of([&] { peak_demand_reduction(demand, daily_baseline(start, zero), 2020, 5); }) == "empty-month");

  const auto two_months = make_frame(make_date(2020, 3, 1), 61, [](std::size_t, int) { return 80.0; });
  const auto report = peak_demand_report(two_months, daily_baseline(make_date(2020, 3, 15), std::vector<double>(60, 100.0)));
  REQUIRE(report.size() == 2);
  CHECK(report[0].days.size() == 17);
  CHECK(report[1].alpha == doctest::Approx(20.0));
}

TEST_CASE("probabilistic peak reduction") {
  const auto start = make_date(2020, 4, 1);
  const auto demand = make_frame(start, 30, [](std::size_t, int h) { return h == 12 ? 100.0 : 40.0; });
  const auto flat = probabilistic_peak_reduction(demand, tracks_from(start, 30, {95, 95, 95, 95, 95}), 2020, 4);
  for (double a : flat.alpha) CHECK(a == flat.alpha[0]);
  CHECK(flat.width_80 == 0.0);
  CHECK_FALSE(flat.crosses_zero);

  const auto straddle = probabilistic_peak_reduction(demand, tracks_from(start, 30, {80, 90, 100, 110, 120}), 2020, 4);
  CHECK(straddle.alpha[0] < 0.0);
  CHECK(straddle.alpha[2] == doctest::Approx(0.0));
  CHECK(straddle.alpha[4] > 0.0);
  CHECK(straddle.crosses_zero);
  CHECK(straddle.width_50 == doctest::Approx((110.0 - 100.0) / 110.0 * 100.0 - (90.0 - 100.0) / 90.0 * 100.0));
  CHECK(straddle.width_80 == doctest::Approx(straddle.alpha[4] - straddle.alpha[0]));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(60.0, 140.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<double, 5> levels;
    for (auto& v : levels) v = u(rng);
    std::sort(levels.begin(), levels.end());
    const auto p = probabilistic_peak_reduction(demand, tracks_from(start, 30, levels), 2020, 4);
    for (std::size_t q = 1; q < 5; ++q) CHECK(p.alpha[q] >= p.alpha[q - 1]);
    CHECK(p.width_50 == doctest::Approx((levels[3] - 100.0) / levels[3] * 100.0 - (levels[1] - 100.0) / levels[1] * 100.0));
  }
}

TEST_CASE("extreme price counts") {
  const auto start = frame::make_timestamp(2019, 1, 1, 0);
  const auto g = test_support::gaussian(100000, 3);
  const auto counts = extreme_price_count(frame::SeriesView::from_values(start, g), baseline::WindowSpec::trailing(720));
  CHECK(std::abs(static_cast<double>(counts.flagged) / static_cast<double>(counts.indexed) - 0.0456) <= 0.005);
  std::size_t sum = 0;
  for (const auto& b : counts.buckets) {
    sum += b.flagged;
    CHECK(frame::weekday_index(b.start) == 1);
  }
  CHECK(sum == counts.flagged);
  CHECK(extreme_price_count(frame::SeriesView::from_values(start, g), baseline::WindowSpec::trailing(720), 1.0).flagged == 0);

  std::vector<double> calm(25000, 50.0);
  for (std::size_t k = 0; k < 20; ++k) calm[1000 + 1200 * k] = k % 2 ? 500.0 : -300.0;
  const auto spikes = extreme_price_count(frame::SeriesView::from_values(start, calm), baseline::WindowSpec::trailing(720));
  CHECK(spikes.flagged == 20);

  const auto monthly = count_extremes(frame::SeriesView::from_values(start, std::vector<double>(24 * 59, 0.99)), 0.9544,
                                      Bucket::monthly);
  REQUIRE(monthly.buckets.size() == 2);
  CHECK(monthly.buckets[0].flagged == 31 * 24);
  CHECK(monthly.buckets[1].start == make_date(2019, 2, 1));

  // weekly blocks are 364-day consistent
  const auto two_years = count_extremes(frame::SeriesView::from_values(start, std::vector<double>(24 * 730, 0.5)), 0.9544,
                                        Bucket::weekly);
  for (const auto& b : two_years.buckets) {
    const auto next = frame::add_days(b.start, 364);
    if (next > make_date(2020, 12, 24)) continue;
    CHECK(std::any_of(two_years.buckets.begin(), two_years.buckets.end(), [&](const BucketCount& o) { return o.start == next; }));
  }
  CHECK(parse_bucket("monthly") == Bucket::monthly);
  CHECK(error_code_of([] { parse_bucket("daily"); }) == "bad-spec");
}

TEST_CASE("logit index") {
  const auto ts_start = frame::make_timestamp(2020, 1, 1, 0);
  const auto l = loi(frame::SeriesView::from_values(ts_start, std::vector<double>{0.5, 0.8, 0.99, 0.0, 1.0}), 720);
  CHECK(*l.values.values()[0] == 0.0);
  CHECK(*l.values.values()[1] == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(l.bands[1] == LoiBand::unusual);
  CHECK(l.bands[2] == LoiBand::highly_unusual);
  CHECK(l.bands[0] == LoiBand::normal);
  CHECK(*l.values.values()[3] == doctest::Approx(std::log(1.0 / 720.0)));
  CHECK(*l.values.values()[4] == doctest::Approx(std::log(720.0)));
  CHECK(l.clamped.size() == 2);
  CHECK(classify_loi(0.75) == LoiBand::unusual);
  CHECK(classify_loi(3.0) == LoiBand::unusual);
  CHECK(classify_loi(0.7499) == LoiBand::normal);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::vector<double> xs(500);
  for (auto& x : xs) x = u(rng);
  std::sort(xs.begin(), xs.end());
  const auto mono = loi(frame::SeriesView::from_values(ts_start, xs), 720);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[i - 1]) CHECK(*mono.values.values()[i] > *mono.values.values()[i - 1]);
  }
  CHECK(error_code_of([&] { loi(frame::SeriesView::from_values(ts_start, std::vector<double>{1.5}), 720); }) == "bad-index");
  CHECK(error_code_of([&] { loi(frame::SeriesView::from_values(ts_start, xs), 0); }) == "bad-window");
}

TEST_CASE("duck curve") {
  const auto start = make_date(2020, 5, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<std::array<double, 24>> d(20), s(20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (int h = 0; h < 24; ++h) {
      d[i][static_cast<std::size_t>(h)] = 2000 + u(rng);
      s[i][static_cast<std::size_t>(h)] = (h > 6 && h < 19) ? u(rng) : 0.0;
    }
  }
  const auto demand = make_frame(start, 20, [&](std::size_t i, int h) { return d[i][static_cast<std::size_t>(h)]; });
  const auto solar = make_frame(start, 20, [&](std::size_t i, int h) { return s[i][static_cast<std::size_t>(h)]; });
  const auto r = duck_curve(demand, solar, start, make_date(2020, 5, 20));
  CHECK(r.days == 20);
  for (std::size_t h = 0; h < 24; ++h) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 20; ++i) mean += (d[i][h] - s[i][h]) / 20.0;
    CHECK(r.profile[h] == doctest::Approx(mean).epsilon(1e-13));
  }
  CHECK(r.range >= 0.0);

  const auto shifted = make_frame(start, 20, [&](std::size_t i, int h) { return d[i][static_cast<std::size_t>(h)] + 321.0; });
  const auto rs = duck_curve(shifted, solar, start, make_date(2020, 5, 20));
  CHECK(rs.max_ramp == doctest::Approx(r.max_ramp));
  CHECK(rs.range == doctest::Approx(r.range));
  CHECK(rs.profile[3] == doctest::Approx(r.profile[3] + 321.0));

  const auto none = make_frame(start, 20, [](std::size_t, int) { return 0.0; });
  const auto same = duck_curve(demand, none, start, make_date(2020, 5, 20));
  CHECK(same.profile[7] == doctest::Approx(r.profile[7] + [&] {
          double m = 0.0;
          for (std::size_t i = 0; i < 20; ++i) m += s[i][7] / 20.0;
          return m;
        }()));

  const auto flat = make_frame(start, 3, [](std::size_t, int) { return 100.0; });
  const auto noon = make_frame(start, 3, [](std::size_t, int h) { return h == 12 ? 30.0 : 0.0; });
  const auto dip = duck_curve(flat, noon, start, make_date(2020, 5, 3));
  CHECK(dip.profile[12] == 70.0);
  CHECK(dip.profile[11] == 100.0);
  CHECK(dip.range == 30.0);
  CHECK(dip.max_ramp == 30.0);
  CHECK(dip.ramp_hour == 13);

  const auto gw = make_frame(start, 3, [](std::size_t, int) { return 1.0; }, "GW");
  CHECK(error_code_of([&] { duck_curve(flat, gw, start, make_date(2020, 5, 3)); }) == "unit-mismatch");
}

TEST_CASE("renewable share and its ARMA baseline") {
  const auto start = frame::make_timestamp(2017, 1, 1, 0);
  auto monthly = [&](const std::vector<double>& v) {
    std::vector<Timestamp> ts;
    for (std::size_t i = 0; i < v.size(); ++i) {
      ts.push_back({make_date(2017 + static_cast<int>(i / 12), static_cast<unsigned>(i % 12 + 1), 1), 0});
    }
    return frame::SeriesView(ts, std::vector<Cell>(v.begin(), v.end()));
  };
  const auto beta = renewable_share(monthly({10, 0}), monthly({15, 0}), monthly({5, 0}));
  CHECK(*beta.values()[0] == 30.0);
  CHECK(*beta.values()[1] == 0.0);
  CHECK(error_code_of([&] { renewable_share(monthly({60}), monthly({30}), monthly({20})); }) == "share-overflow");
  CHECK(error_code_of([&] { renewable_share(monthly({-1}), monthly({30}), monthly({20})); }) == "bad-share");
  CHECK(error_code_of([&] { renewable_share(monthly({1, 2}), monthly({3}), monthly({2})); }) == "misaligned");
  (void)start;

  // AR(2) shares: the fitted forecast stays inside the two-sigma band of the true forecast
  const double a1 = 0.6, a2 = -0.3, mu = 30.0, sd = 1.0;
  int inside = 0;
  for (unsigned seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> x(300, mu);
    for (std::size_t t = 2; t < x.size(); ++t) x[t] = mu + a1 * (x[t - 1] - mu) + a2 * (x[t - 2] - mu) + sd * z(rng);
    std::vector<double> tail(x.end() - 124, x.end());
    const auto series = monthly(tail);
    const auto fit = renewable_baseline(series, make_date(2027, 1, 1), {2, 0, 0});
    std::vector<double> truth{tail[119], tail[118]};
    double psi_prev = 1.0, psi_prev2 = 0.0, var = 0.0;
    bool ok = true;
    for (int h = 0; h < 4; ++h) {
      const double next = mu + a1 * (truth[0] - mu) + a2 * (truth[1] - mu);
      truth = {next, truth[0]};
      var += psi_prev * psi_prev;
      ok = ok && std::abs(*fit.baseline.values[static_cast<std::size_t>(h)] - next) <= 2.0 * std::sqrt(var) * sd;
      const double psi = a1 * psi_prev + a2 * psi_prev2;
      psi_prev2 = psi_prev;
      psi_prev = psi;
    }
    inside += ok;
  }
  CHECK(inside >= 19);

  std::vector<double> short_share(36);
  for (std::size_t i = 0; i < 36; ++i) short_share[i] = 30 + 5 * std::sin(static_cast<double>(i) * 0.52) + 0.3 * std::cos(i * 1.7);
  const auto small = renewable_baseline(monthly(short_share), make_date(2019, 9, 1));
  CHECK(small.baseline.values.size() == 4);
  CHECK(small.baseline.method == "arma(2,0,1)");
  CHECK(std::isfinite(small.baseline_mean));
}

TEST_CASE("price regressions") {
  const auto in = scenarios::price_inputs(7);
  const auto r = price_regression_dummy(in);
  const std::vector<std::string> names{"gas:pandemic", "gas", "pandemic", "intercept"};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(r.ols.coefficients[i].term == names[i]);
    CHECK(std::abs(r.ols.coefficients[i].estimate - scenarios::kPriceTheta[i]) <= 0.2);
  }
  CHECK(r.significant[0]);
  CHECK(r.significant[2]);
  // residual orthogonality
  const auto x = regress::design_matrix(r.ols.spec, learners::FeatureMatrix({"loi", "gas", "pandemic"}, [&] {
                                          Eigen::MatrixXd m(2000, 3);
                                          for (Eigen::Index i = 0; i < 2000; ++i) {
                                            m(i, 0) = *in.response.values()[static_cast<std::size_t>(i)];
                                            m(i, 1) = *in.gas.values()[static_cast<std::size_t>(i)];
                                            m(i, 2) = *in.pandemic.values()[static_cast<std::size_t>(i)];
                                          }
                                          return m;
                                        }()));
  CHECK((x.transpose() * r.ols.residuals).cwiseAbs().maxCoeff() <= 1e-8);

  auto none = in;
  none.pandemic = studies::pandemic_dummy(in.response.timestamps(), make_date(2100, 1, 1));
  CHECK(error_code_of([&] { price_regression_dummy(none); }) == "collinear");
  auto bad = in;
  bad.pandemic = frame::SeriesView(in.pandemic.timestamps(), std::vector<Cell>(in.pandemic.size(), 0.5));
  CHECK(error_code_of([&] { price_regression_dummy(bad); }) == "bad-dummy");

  const auto c = price_regression_cases(in);
  CHECK(c.ols.coefficients[2].term == "gas:cases");
  CHECK(c.ols.residuals.size() == 2000);

  // no gas-by-cases effect in the generator: the interaction estimate is within 2 standard errors of 0
  int covered = 0;
  for (unsigned seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> gas(1.0, 4.0), cases(0.0, 50.0);
    std::vector<frame::Timestamp> ts;
    std::vector<Cell> y, g, k;
    for (std::size_t i = 0; i < 500; ++i) {
      ts.push_back({frame::add_days(make_date(2019, 1, 1), static_cast<long>(i)), 0});
      g.push_back(gas(rng));
      k.push_back(cases(rng));
      y.push_back(4.4 * *g.back() + 2.9 * *k.back() + 0.0 * *g.back() * *k.back() - 8.0 + z(rng));
    }
    const PriceStudyInputs sim{{ts, y}, {ts, g}, {ts, k}, studies::pandemic_dummy(ts, make_date(2019, 6, 1))};
    const auto& t = price_regression_cases(sim).ols.coefficients[2];
    covered += std::abs(t.estimate) <= 2.0 * t.std_error;
  }
  CHECK(covered >= 90);
}

TEST_CASE("mean absolute percentage error") {
  const std::vector<double> a(10, 100.0), p(10, 90.0);
  CHECK(mape(a, a) == 0.0);
  CHECK(mape(a, p) == doctest::Approx(10.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  std::vector<double> x(200), y(200);
  double oracle = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    x[i] = u(rng) * (i % 3 ? 1 : -1);
    y[i] = u(rng);
    oracle += std::abs(x[i] - y[i]) / std::abs(x[i]) / 200.0 * 100.0;
  }
  CHECK(std::abs(mape(x, y) - oracle) <= 1e-12);
  const auto ts = frame::SeriesView::from_values(frame::make_timestamp(2020, 2, 1, 0), std::vector<double>{1.0, 0.0});
  try {
    mape(ts, std::vector<double>{1.0, 1.0});
    FAIL("expected zero-actual");
  } catch (const Error& e) {
    CHECK(e.code() == "zero-actual");
    CHECK(std::string(e.what()).find("2020-02-01T01") != std::string::npos);
  }
  CHECK(error_code_of([&] { mape(a, std::vector<double>{1.0}); }) == "misaligned");
}

TEST_CASE("residual correction from a daily indicator") {
  const auto temp = test_support::gaussian(24 * 120, 10, 5.0);
  std::vector<Timestamp> ts;
  for (std::size_t i = 0; i < temp.size(); ++i) ts.push_back(frame::from_hours(frame::to_hours({make_date(2020, 1, 1), 0}) + static_cast<long>(i)));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.3, 1.0);
  std::vector<Timestamp> days;
  std::vector<Cell> m;
  for (long d = -1; d < 120; ++d) {
    days.push_back({frame::add_days(make_date(2020, 1, 1), d), 0});
    m.push_back(u(rng));
  }
  const frame::SeriesView mobility(days, m);
  const frame::Date event = make_date(2020, 3, 1);
  std::vector<Cell> demand;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double v = 3.0 * temp[i] + 500.0;
    if (ts[i].date >= event) v += -200.0 + 150.0 * *mobility.at({frame::add_days(ts[i].date, -1), 0});
    demand.push_back(v);
  }
  EnhancementInputs in;
  baseline::FeatureOptions none{false, false, false, false};
  in.features = baseline::build_features(ts, {{"temperature", frame::SeriesView(ts, std::vector<Cell>(temp.begin(), temp.end()))}},
                                         nullptr, none);
  in.demand = frame::SeriesView(ts, demand);
  in.enhancers = {{"mobility", mobility}};
  in.base = learners::LearnerSpec{learners::RidgeSpec{0.0}};
  in.event = event;
  in.calibration = {event, make_date(2020, 3, 10)};
  in.normal = {make_date(2020, 1, 1), make_date(2020, 2, 29)};
  in.lockdown = {make_date(2020, 3, 11), make_date(2020, 4, 29)};
  const auto report = mobility_enhanced_forecast(in);
  CHECK(report.score("base").lockdown_mape > 1.0);
  CHECK(*report.score("base").normal_mape <= 1e-8);
  CHECK(report.score("base+mobility").lockdown_mape <= 1e-8);
  CHECK(report.score("base+mobility").correction[1] == doctest::Approx(150.0));

  // an unrelated indicator cannot help
  std::vector<Cell> noise;
  for (std::size_t i = 0; i < days.size(); ++i) noise.push_back(u(rng));
  auto null_in = in;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].date >= event) demand[i] = 3.0 * temp[i] + 500.0 - 100.0 + 20.0 * std::normal_distribution<double>()(rng);
  }
  null_in.demand = frame::SeriesView(ts, demand);
  null_in.enhancers = {{"noise", frame::SeriesView(days, noise)}};
  null_in.calibration = {event, make_date(2020, 3, 31)};
  const auto null_report = mobility_enhanced_forecast(null_in);
  const auto& base = null_report.score("base");
  const auto& noisy = null_report.score("base+noise");
  // the intercept absorbs the level shift; the slope adds nothing
  CHECK(std::abs(noisy.correction[1]) <= 10.0);
  CHECK(noisy.lockdown_mape <= base.lockdown_mape);

  auto empty = in;
  empty.calibration = {make_date(2021, 1, 1), make_date(2021, 1, 2)};
  CHECK(error_code_of([&] { mobility_enhanced_forecast(empty); }) == "no-calibration-data");
}

TEST_CASE("lockdown scenario favours the mobility correction") {
  const auto report = mobility_enhanced_forecast(scenarios::lockdown_scenario(42));
  const auto& base = report.score("base");
  const auto& updated = report.score("updated");
  const auto& mob = report.score("base+mobility");
  MESSAGE("base " << base.lockdown_mape << " updated " << updated.lockdown_mape << " mobility " << mob.lockdown_mape
                  << " normal " << *base.normal_mape);
  CHECK(mob.lockdown_mape <= 0.5 * base.lockdown_mape);
  CHECK((base.lockdown_mape - updated.lockdown_mape) / base.lockdown_mape < 0.10);
  CHECK(mob.improvement > updated.improvement);
}

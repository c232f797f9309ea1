#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "gridtrace/stats/distributions.hpp"
#include "support.hpp"

using namespace gridtrace::stats;

// Boost.Math serves only as an independent oracle for the in-house special functions.

TEST_CASE("incomplete beta matches the reference implementation") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 150.0, 1000.0}) {
    for (double b : {0.5, 1.0, 3.0, 40.0, 997.0}) {
      for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
        const double ref = boost::math::ibeta(a, b, x);
        CHECK(std::abs(beta_inc(a, b, x) - ref) <= 1e-10 * std::max(1.0, ref));
      }
    }
  }
}

TEST_CASE("incomplete gamma matches the reference implementation") {
  for (double a : {0.5, 1.0, 2.0, 7.5, 50.0, 500.0}) {
    for (double x : {1e-5, 0.3, 1.0, 4.0, 20.0, 60.0, 520.0}) {
      CHECK(std::abs(gamma_p(a, x) - boost::math::gamma_p(a, x)) <= 1e-10);
      CHECK(std::abs(gamma_q(a, x) - boost::math::gamma_q(a, x)) <= 1e-10);
    }
  }
}

TEST_CASE("distribution tails") {
  for (double dof : {3.0, 17.0, 196.0}) {
    boost::math::students_t st(dof);
    for (double t : {-4.0, -1.3, 0.0, 0.7, 2.65}) {
      const double ref = 2.0 * boost::math::cdf(boost::math::complement(st, std::abs(t)));
      CHECK(std::abs(student_t_two_sided(t, dof) - ref) <= 1e-10);
    }
  }
  boost::math::fisher_f ff(3.0, 196.0);
  for (double f : {0.1, 1.0, 2.5, 9.0}) {
    CHECK(std::abs(f_sf(f, 3.0, 196.0) - boost::math::cdf(boost::math::complement(ff, f))) <= 1e-10);
  }
  boost::math::chi_squared cs(10.0);
  for (double x : {0.5, 9.3, 18.3, 40.0}) {
    CHECK(std::abs(chi2_sf(x, 10.0) - boost::math::cdf(boost::math::complement(cs, x))) <= 1e-10);
  }
  CHECK(std::abs(normal_cdf(1.959963984540054) - 0.975) <= 1e-12);
}

TEST_CASE("type-7 quantiles") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i + 1;
  // h = 99 q: 9.9 -> 10.9, 24.75 -> 25.75, 49.5 -> 50.5, 74.25 -> 75.25, 89.1 -> 90.1
  CHECK(quantile_sorted(v, 0.10) == doctest::Approx(10.9).epsilon(1e-14));
  CHECK(quantile_sorted(v, 0.25) == doctest::Approx(25.75).epsilon(1e-14));
  CHECK(quantile_sorted(v, 0.50) == doctest::Approx(50.5).epsilon(1e-14));
  CHECK(quantile_sorted(v, 0.75) == doctest::Approx(75.25).epsilon(1e-14));
  CHECK(quantile_sorted(v, 0.90) == doctest::Approx(90.1).epsilon(1e-14));
  CHECK(quantile_sorted(std::vector<double>{4.0}, 0.3) == 4.0);
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
}

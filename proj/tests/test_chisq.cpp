#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "symlat/gaussian.hpp"

using namespace symlat;

namespace {

// Upper tail by direct quadrature of the chi-square density.
double quadrature_sf(double x, double df) {
  const double k = df / 2;
  const double log_norm = k * std::log(2.0) + std::lgamma(k);
  auto density = [&](double t) {
    const double u = x + t;
    return std::exp((k - 1) * std::log(u) - u / 2 - log_norm);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(density, 0.0, std::numeric_limits<double>::infinity(), 1e-14);
}

}  // namespace

TEST_CASE("reference values") {
  CHECK(chisq_sf(0, 3) == 1.0);
  CHECK(chisq_sf(2.705543, 1) == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(chisq_sf(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chisq_sf(2, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(chisq_sf(1e4, 2) == doctest::Approx(std::exp(-5e3)).epsilon(1e-10));
}

TEST_CASE("agrees with an independent integration") {
  const std::vector<std::pair<double, double>> points{
      {0.3, 1},  {1.0, 1},  {5.0, 1},   {12.0, 1}, {0.5, 2},   {4.0, 2},   {0.8, 3},
      {7.8, 3},  {2.0, 5},  {11.07, 5}, {15.0, 5}, {3.0, 8},   {20.0, 8},  {9.0, 10},
      {25.0, 10}, {18.0, 17}, {40.0, 17}, {30.0, 29}, {60.0, 29}, {110.0, 90}};
  REQUIRE(points.size() == 20);
  for (auto [x, df] : points) {
    CAPTURE(x);
    CAPTURE(df);
    const double want = quadrature_sf(x, df);
    CHECK(std::abs(chisq_sf(x, df) - want) <= 1e-10 * want);
  }
}

TEST_CASE("upper regularised gamma") {
  CHECK(gamma_q(1, 3) == doctest::Approx(std::exp(-3.0)).epsilon(1e-14));
  CHECK(gamma_q(0.5, 0.0) == 1.0);
  CHECK(gamma_q(4, 1e-3) == doctest::Approx(1.0));
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tabdrw/special.hpp"

using namespace tabdrw;

namespace {

// Adaptive Simpson quadrature, used as an independent oracle.
double simpson(double (*f)(double), double a, double b) {
  double c = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(c) + f(b));
}

double adaptive(double (*f)(double), double a, double b, double whole, double eps, int depth) {
  double c = 0.5 * (a + b);
  double left = simpson(f, a, c), right = simpson(f, c, b);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive(f, a, c, left, 0.5 * eps, depth - 1) +
         adaptive(f, c, b, right, 0.5 * eps, depth - 1);
}

double integrate(double (*f)(double), double a, double b, double eps = 1e-14) {
  return adaptive(f, a, b, simpson(f, a, b), eps, 40);
}

double pdf(double x) { return normal_pdf(x); }
double e1_integrand(double t) { return std::exp(-t) / t; }

}  // namespace

TEST_CASE("normal cdf reference values") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK_THAT(normal_cdf(1.96), Catch::Matchers::WithinAbs(0.9750021048517795, 1e-14));
  CHECK_THAT(normal_cdf(-1.0), Catch::Matchers::WithinAbs(0.15865525393145707, 1e-14));
  CHECK_THAT(normal_cdf(3.0), Catch::Matchers::WithinAbs(0.9986501019683699, 1e-14));
}

TEST_CASE("normal cdf agrees with quadrature of the density") {
  for (double x = 0.05; x <= 8.0; x *= 1.3) {
    const double oracle = 0.5 + integrate(pdf, 0.0, x);
    CHECK_THAT(normal_cdf(x), Catch::Matchers::WithinAbs(oracle, 1e-12));
    CHECK_THAT(normal_cdf(-x), Catch::Matchers::WithinAbs(1.0 - oracle, 1e-12));
  }
}

TEST_CASE("normal quantile inverts the cdf") {
  CHECK_THAT(normal_quantile(0.999), Catch::Matchers::WithinAbs(3.0902323061678132, 1e-9));
  CHECK_THAT(normal_quantile(0.5), Catch::Matchers::WithinAbs(0.0, 1e-12));
  for (double p : {1e-6, 1e-3, 0.05, 0.3, 0.7, 0.95, 0.999, 1.0 - 1e-9})
    CHECK_THAT(normal_cdf(normal_quantile(p)), Catch::Matchers::WithinAbs(p, 1e-12));
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("exponential integral reference values") {
  CHECK_THAT(exp_integral_e1(1.0), Catch::Matchers::WithinAbs(0.21938393439552026, 1e-13));
  CHECK_THAT(exp_integral_e1(0.5), Catch::Matchers::WithinAbs(0.5597735947761607, 1e-13));
  CHECK_THAT(exp_integral_e1(2.0), Catch::Matchers::WithinAbs(0.04890051070806112, 1e-13));
  CHECK_THAT(exp_integral_e1(10.0), Catch::Matchers::WithinAbs(4.156968929685325e-06, 1e-16));
  CHECK_THROWS_AS(exp_integral_e1(0.0), std::domain_error);
  CHECK_THROWS_AS(exp_integral_e1(-1.0), std::domain_error);
}

TEST_CASE("exponential integral agrees with quadrature") {
  // Integrate e^{-t}/t from u out to u+60 (the tail beyond is < 1e-26 here).
  for (double u : {0.01, 0.1, 0.3, 1.0, 1.5, 3.0, 8.0, 20.0}) {
    const double oracle = integrate(e1_integrand, u, u + 60.0);
    CHECK_THAT(exp_integral_e1(u), Catch::Matchers::WithinAbs(oracle, 1e-11));
  }
}

TEST_CASE("exponential integral is strictly decreasing") {
  double prev = exp_integral_e1(1e-4);
  for (double u = 1e-3; u < 50.0; u *= 1.5) {
    const double cur = exp_integral_e1(u);
    CHECK(cur < prev);
    prev = cur;
  }
}

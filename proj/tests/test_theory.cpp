#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tabdrw/dft.hpp"
#include "tabdrw/embed.hpp"
#include "tabdrw/prng.hpp"
#include "tabdrw/theory.hpp"

using namespace tabdrw;

TEST_CASE("beta vector closed form for a single frequency") {
  SpectrumSet ss;
  ss.p = 5;
  ss.s = {1};
  auto beta = beta_vector(ss, 1);
  const double s1 = std::sin(2.0 * M_PI / 5.0);
  CHECK_THAT(beta[1], Catch::Matchers::WithinAbs(s1 * s1, 1e-14));  // sin^2(2 pi / 5)
  CHECK_THAT(beta[0], Catch::Matchers::WithinAbs(0.0, 1e-14));
  CHECK_THAT(beta[2], Catch::Matchers::WithinAbs(
                          std::sin(4.0 * M_PI / 5.0) * s1, 1e-14));
  SpectrumSet bad = ss;
  bad.s = {4};  // outside {1..m} for p = 5
  CHECK_THROWS_AS(beta_vector(bad, 0), std::invalid_argument);
}

TEST_CASE("two-point dft sanity") {
  auto y = dft_row({1.0, -1.0});
  CHECK_THAT(y.y[0].real(), Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(y.y[1].real(), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK_THAT(y.y[1].imag(), Catch::Matchers::WithinAbs(0.0, 1e-15));
}

TEST_CASE("delta = -1 cancels the distortion entirely") {
  SpectrumSet ss;
  ss.p = 7;
  ss.s = {1, 3};
  std::vector<double> x{0.4, -1.2, 0.7, 2.0, -0.3, 0.9, -1.5};
  for (double d : predicted_delta(x, ss, -1.0)) CHECK(d == 0.0);
}

TEST_CASE("predicted delta matches a direct spectral edit") {
  // Flip the imaginary parts of the frequencies in S by hand and compare the
  // resulting row change against -alpha beta^T x.
  Prng g(99);
  const int p = 11;
  const double delta = 0.5;
  SpectrumSet ss;
  ss.p = p;
  ss.s = {2, 4, 5};
  DftPlan plan(p);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(p);
    for (auto& v : x) v = g.normal();
    SpectralRow y = plan.forward(x.data());
    for (int t : ss.s) {
      y.y[t] = {y.y[t].real(), -delta * y.y[t].imag()};
      y.y[p - t] = std::conj(y.y[t]);
    }
    auto x2 = plan.inverse(y);
    auto pred = predicted_delta(x, ss, delta);
    for (int j = 0; j < p; ++j)
      CHECK_THAT(x2[j] - x[j], Catch::Matchers::WithinAbs(pred[j], 1e-11));
  }
}

TEST_CASE("script_I closed form at lambda_min = lambda_max = 1") {
  for (double s : {0.1, 0.5, 1.0, 2.0})
    CHECK_THAT(script_I(s, 1.0, 1.0),
               Catch::Matchers::WithinAbs(s / (2.0 * std::sqrt(s * s + 1.0)), 1e-12));
  CHECK(script_I(0.5, 0.5, 2.0) > script_I(0.5, 1.0, 1.0) * 0.0);  // finite
  CHECK_THROWS_AS(script_I(-1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(script_I(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("z lower bound reference values") {
  BoundParams prm;  // N=1000, p=11, gamma=delta=0.5, identity covariance
  prm.sigma = 0.1;
  CHECK_THAT(z_lower_bound(prm), Catch::Matchers::WithinAbs(30.13, 0.02));
  prm.sigma = 0.5;
  CHECK_THAT(z_lower_bound(prm), Catch::Matchers::WithinAbs(14.95, 0.02));
  prm.sigma = 1.0;
  CHECK_THAT(z_lower_bound(prm), Catch::Matchers::WithinAbs(7.04, 0.02));
}

TEST_CASE("z lower bound decreases in sigma") {
  BoundParams prm;
  double prev = 1e9;
  for (double s = 0.05; s < 2.0; s += 0.05) {
    prm.sigma = s;
    const double b = z_lower_bound(prm);
    CHECK(b < prev);
    prev = b;
  }
}

TEST_CASE("sample size reference values") {
  BoundParams prm;
  for (auto [sigma, expected] : {std::pair{0.1, 108L}, {0.2, 153L}, {0.5, 437L}}) {
    prm.sigma = sigma;
    CHECK(sample_size_bound(0.001, 0.01, prm) == expected);
  }
  prm.sigma = 50.0;  // bracket is tiny but positive: huge yet finite N
  CHECK(sample_size_bound(0.001, 0.01, prm) > 100000000L);
  prm.sigma = 0.1;
  prm.gamma = 0.0;  // nothing is ever modified: the bound is vacuous
  CHECK_THROWS_AS(sample_size_bound(0.001, 0.01, prm), std::domain_error);
  prm.gamma = 0.5;
  CHECK_THROWS_AS(sample_size_bound(0.0, 0.01, prm), std::invalid_argument);
}

TEST_CASE("subgaussian bound matches a fine grid search") {
  const long n = 1000;
  const int m = 5;
  const double gamma = 0.5, delta = 0.5, sigma = 0.3, lmin = 1.0, kappa = 1.5, c4 = 3.0;
  const double k4 = 2.0 * c4 * kappa * kappa * kappa * kappa;
  double best = 0.0;
  for (int i = 1; i < 100000; ++i) {
    const double theta = double(i) / 100000.0;
    const double rho = (1.0 - theta) * (1.0 - theta) / k4;
    const double v = rho * (2.0 - std::exp(-theta * lmin / (2.0 * sigma * sigma)) -
                            std::exp(-theta * lmin * delta * delta / (2.0 * sigma * sigma)));
    best = std::max(best, v);
  }
  const double oracle = std::sqrt(double(m) * double(n)) * gamma * best;
  CHECK_THAT(subgaussian_z_bound(n, m, gamma, delta, sigma, lmin, kappa, c4),
             Catch::Matchers::WithinRel(oracle, 1e-6));
  CHECK_THROWS_AS(subgaussian_z_bound(n, m, gamma, delta, sigma, lmin, 0.5, c4),
                  std::invalid_argument);
}

TEST_CASE("bound parameter validation") {
  BoundParams prm;
  prm.lambda_min = -1.0;
  CHECK_THROWS_AS(z_lower_bound(prm), std::invalid_argument);
  prm = BoundParams{};
  prm.delta = 0.0;
  CHECK_THROWS_AS(z_lower_bound(prm), std::invalid_argument);
  prm = BoundParams{};
  prm.p = 2;  // m = 0
  CHECK_THROWS_AS(z_lower_bound(prm), std::invalid_argument);
}

TEST_CASE("w2 bound and delta_pcc shapes") {
  SpectrumSet ss;
  ss.p = 5;
  ss.s = {1, 2};
  std::vector<std::vector<double>> eye(5, std::vector<double>(5, 0.0));
  for (int i = 0; i < 5; ++i) eye[i][i] = 1.0;
  const double alpha = 2.0 * 1.5 / 5.0;
  auto b1 = beta_vector(ss, 1);
  auto b2 = beta_vector(ss, 2);
  double quad = 0.0;
  for (int i = 0; i < 5; ++i) quad += b1[i] * b1[i];
  CHECK_THAT(w2_bound(eye, b1, alpha), Catch::Matchers::WithinAbs(alpha * std::sqrt(quad), 1e-14));
  // identity covariance: Delta r = -alpha (beta_l[j] + beta_j[l]) + alpha^2 beta_j . beta_l
  double dot = 0.0;
  for (int i = 0; i < 5; ++i) dot += b1[i] * b2[i];
  CHECK_THAT(delta_pcc(eye, b1, b2, 1, 2, alpha),
             Catch::Matchers::WithinAbs(-alpha * (b2[1] + b1[2]) + alpha * alpha * dot, 1e-14));
}

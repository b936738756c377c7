#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>

#include "tabdrw/dft.hpp"
#include "tabdrw/prng.hpp"
#include "tabdrw/synthgen.hpp"
#include "tabdrw/transform.hpp"
#include "tabdrw/yeo_johnson.hpp"

using namespace tabdrw;

TEST_CASE("yeo-johnson forward/inverse roundtrip") {
  Prng g(11);
  for (int c = 0; c < 10000; ++c) {
    const double lambda = -2.0 + 4.0 * g.uniform();
    const double x = -5.0 + 10.0 * g.uniform();
    const double y = yj_forward(x, lambda);
    const double back = yj_inverse(y, lambda);
    CHECK_THAT(back, Catch::Matchers::WithinAbs(x, 1e-10 * (1.0 + std::abs(x))));
  }
  // boundary lambdas hit the log branches
  CHECK_THAT(yj_forward(1.0, 0.0), Catch::Matchers::WithinAbs(std::log(2.0), 1e-15));
  CHECK_THAT(yj_forward(-1.0, 2.0), Catch::Matchers::WithinAbs(-std::log(2.0), 1e-15));
  CHECK(yj_forward(0.0, 1.7) == 0.0);
}

TEST_CASE("yj_inverse rejects values outside the range") {
  // lambda < 0: Psi saturates at -1/lambda on the positive side
  CHECK_THROWS_AS(yj_inverse(2.1, -0.5), std::domain_error);
  // lambda > 2: saturates at 1/(2-lambda) on the negative side
  CHECK_THROWS_AS(yj_inverse(-2.1, 2.5), std::domain_error);
}

TEST_CASE("fit_lambda matches a fine grid search") {
  Prng g(23);
  std::vector<double> col(400);
  for (auto& v : col) v = std::exp(g.normal());  // right-skewed: lambda well below 1

  double jac = 0.0;
  std::vector<double> sorted(col);
  std::sort(sorted.begin(), sorted.end());
  for (double x : sorted) jac += (x >= 0.0 ? 1.0 : -1.0) * std::log1p(std::abs(x));
  double best = -5.0, best_ll = -1e308;
  for (double l = -5.0; l <= 5.0; l += 0.001) {
    const double ll = detail::yj_profile_ll(sorted, l, jac);
    if (ll > best_ll) {
      best_ll = ll;
      best = l;
    }
  }
  CHECK_THAT(fit_lambda(col), Catch::Matchers::WithinAbs(best, 0.01));
  CHECK(fit_lambda(col) < 0.5);
}

TEST_CASE("fit_lambda on near-gaussian data stays near 1") {
  Prng g(7);
  std::vector<double> col(5000);
  for (auto& v : col) v = g.normal();
  CHECK_THAT(fit_lambda(col), Catch::Matchers::WithinAbs(1.0, 0.15));
}

TEST_CASE("fit_lambda rejects degenerate columns") {
  CHECK_THROWS_AS(fit_lambda({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_lambda(std::vector<double>(10, 3.0)), std::invalid_argument);
}

TEST_CASE("fit_lambda is invariant under row order") {
  Prng g(31);
  std::vector<double> col(300);
  for (auto& v : col) v = g.normal() * 2.0 + 1.0;
  std::vector<double> shuffled(col.rbegin(), col.rend());
  CHECK(fit_lambda(col) == fit_lambda(shuffled));
}

TEST_CASE("dft roundtrip and parseval") {
  Prng g(5);
  for (int c = 0; c < 10000; ++c) {
    const int p = 3 + int(g.below(30));
    std::vector<double> x(p);
    double energy = 0.0;
    for (auto& v : x) {
      v = g.normal();
      energy += v * v;
    }
    SpectralRow y = dft_row(x);
    CHECK(y.m == (p - 1) / 2);
    double spec_energy = 0.0;
    for (const auto& c2 : y.y) spec_energy += std::norm(c2);
    CHECK_THAT(spec_energy, Catch::Matchers::WithinAbs(energy, 1e-9 * (1.0 + energy)));
    auto back = idft_row(y);
    for (int n = 0; n < p; ++n) CHECK_THAT(back[n], Catch::Matchers::WithinAbs(x[n], 1e-10));
  }
}

TEST_CASE("idft rejects asymmetric spectra") {
  SpectralRow y;
  y.y = {{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}};  // y_2 != conj(y_1)
  y.m = 1;
  CHECK_THROWS_AS(idft_row(y), std::domain_error);
}

TEST_CASE("fit_transform standardizes and inverse_transform undoes it") {
  GaussianSpec spec;
  spec.n_rows = 500;
  spec.p = 6;
  spec.seed = 42;
  Table t = generate(spec);
  for (auto& row : t.values) row[2] = std::exp(row[2]);  // one skewed column

  TransformState tmpl;
  tmpl.columns = {0, 1, 2, 3, 4, 5};
  auto [z, st] = fit_transform(t, tmpl);

  for (int j = 0; j < 6; ++j) {
    double mean = 0.0, var = 0.0;
    for (const auto& row : z) mean += row[j];
    mean /= double(z.size());
    for (const auto& row : z) var += (row[j] - mean) * (row[j] - mean);
    var /= double(z.size());
    CHECK_THAT(mean, Catch::Matchers::WithinAbs(0.0, 1e-10));
    CHECK_THAT(var, Catch::Matchers::WithinAbs(1.0, 1e-10));
  }

  Table back = inverse_transform(z, st, t);
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (int j = 0; j < 6; ++j)
      CHECK_THAT(back.values[i][j],
                 Catch::Matchers::WithinAbs(t.values[i][j], 1e-8 * (1.0 + std::abs(t.values[i][j]))));
}

TEST_CASE("frozen transform reproduces the refit result") {
  GaussianSpec spec;
  spec.n_rows = 200;
  spec.p = 5;
  spec.seed = 9;
  Table t = generate(spec);
  TransformState tmpl;
  tmpl.columns = {0, 1, 2, 3, 4};
  auto [z1, st] = fit_transform(t, tmpl);
  st.refit = false;
  auto [z2, st2] = fit_transform(t, st);
  for (std::size_t i = 0; i < z1.size(); ++i)
    for (int j = 0; j < 5; ++j) CHECK_THAT(z2[i][j], Catch::Matchers::WithinAbs(z1[i][j], 1e-12));
}

TEST_CASE("permutation reorders the working columns and inverts cleanly") {
  GaussianSpec spec;
  spec.n_rows = 50;
  spec.p = 4;
  spec.seed = 3;
  Table t = generate(spec);
  TransformState tmpl;
  tmpl.columns = {0, 1, 2, 3};
  tmpl.permutation = {2, 0, 3, 1};
  auto [z, st] = fit_transform(t, tmpl);
  // working column 0 is table column 2
  TransformState ident = tmpl;
  ident.permutation.clear();
  auto [zi, sti] = fit_transform(t, ident);
  for (std::size_t i = 0; i < t.rows(); ++i) CHECK(z[i][0] == zi[i][2]);

  Table back = inverse_transform(z, st, t);
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (int j = 0; j < 4; ++j)
      CHECK_THAT(back.values[i][j], Catch::Matchers::WithinAbs(t.values[i][j], 1e-8));
}

TEST_CASE("transform validation errors") {
  GaussianSpec spec;
  spec.n_rows = 20;
  spec.p = 3;
  spec.seed = 1;
  Table t = generate(spec);
  TransformState bad;
  bad.columns = {0, 0, 1};
  CHECK_THROWS_AS(fit_transform(t, bad), std::invalid_argument);
  bad.columns = {0, 1, 7};
  CHECK_THROWS_AS(fit_transform(t, bad), std::invalid_argument);
  bad.columns = {0, 1, 2};
  bad.permutation = {0, 1, 1};
  CHECK_THROWS_AS(fit_transform(t, bad), std::invalid_argument);

  Table constant = t;
  for (auto& row : constant.values) row[1] = 5.0;
  TransformState ok;
  ok.columns = {0, 1, 2};
  CHECK_THROWS_AS(fit_transform(constant, ok), std::invalid_argument);
}

TEST_CASE("transform state serialization roundtrip") {
  TransformState st;
  st.columns = {4, 1, 3};
  st.permutation = {2, 0, 1};
  st.refit = false;
  st.params = {{0.75, -1.25, 2.5}, {1.0, 0.0, 1.0}, {-0.5, 3.0, 0.125}};
  const std::string path = "/tmp/tabdrw_test_state.txt";
  write_transform_state(st, path);
  TransformState back = read_transform_state(path);
  std::remove(path.c_str());
  CHECK(back.columns == st.columns);
  CHECK(back.permutation == st.permutation);
  CHECK(back.refit == st.refit);
  REQUIRE(back.params.size() == 3);
  for (int j = 0; j < 3; ++j) {
    CHECK(back.params[j].lambda == st.params[j].lambda);
    CHECK(back.params[j].mean == st.params[j].mean);
    CHECK(back.params[j].std == st.params[j].std);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "tabdrw/fidelity.hpp"
#include "tabdrw/prng.hpp"
#include "tabdrw/synthgen.hpp"

using namespace tabdrw;

TEST_CASE("ks statistic on shifted supports") {
  CHECK(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}) == 0.5);
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({0, 0, 0}, {1, 1, 1}) == 1.0);
  CHECK_THROWS_AS(ks_statistic({}, {1.0}), std::invalid_argument);
}

TEST_CASE("tvd on label frequencies") {
  // 50/50 vs 75/25 -> 0.25
  std::vector<double> a{0, 0, 1, 1};
  std::vector<double> b{0, 0, 0, 1};
  CHECK(tvd(a, b, 2) == 0.25);
  CHECK(tvd(a, a, 2) == 0.0);
  CHECK_THROWS_AS(tvd({0.0, 5.0}, {0.0}, 2), std::invalid_argument);
}

TEST_CASE("w2 of a shifted sample is the shift") {
  Prng g(1);
  std::vector<double> a(500), b(500);
  for (int i = 0; i < 500; ++i) {
    a[i] = g.normal();
    b[i] = a[i] + 0.75;
  }
  CHECK_THAT(empirical_w2_1d(a, b), Catch::Matchers::WithinAbs(0.75, 1e-12));
  CHECK_THROWS_AS(empirical_w2_1d({1.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("sorted coupling is optimal among permutation couplings") {
  // brute force over all 120 assignments of 5 points
  std::vector<double> a{0.3, -1.2, 0.9, 2.4, -0.5};
  std::vector<double> b{1.1, -0.7, 0.2, -2.0, 0.6};
  std::vector<int> perm{0, 1, 2, 3, 4};
  double best = 1e300;
  do {
    double s = 0.0;
    for (int i = 0; i < 5; ++i) s += (a[i] - b[perm[i]]) * (a[i] - b[perm[i]]);
    best = std::min(best, std::sqrt(s / 5.0));
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK_THAT(empirical_w2_1d(a, b), Catch::Matchers::WithinAbs(best, 1e-12));
}

namespace {

Table mixed_table(int n, std::uint64_t seed) {
  GaussianSpec spec;
  spec.n_rows = n;
  spec.p = 4;
  spec.seed = seed;
  Table t = generate(spec);
  t.schema.push_back({"cat", ColumnKind::make_categorical({"u", "v"}), {}, {}});
  Prng g = keyed_prng(seed, "labels");
  for (auto& row : t.values) row.push_back(double(g.below(2)));
  return t;
}

}  // namespace

TEST_CASE("identical tables score perfect fidelity") {
  Table t = mixed_table(300, 5);
  FidelityReport rep = fidelity_report(t, t);
  CHECK(rep.density == 1.0);
  CHECK(rep.corr == 1.0);
  CHECK(rep.mean_abs_corr_change == 0.0);
  CHECK(rep.per_column_distances.size() == 5);
  CHECK(rep.skipped_pairs.empty());
}

TEST_CASE("density and corr scores are symmetric") {
  Table a = mixed_table(400, 6);
  Table b = mixed_table(400, 7);
  CHECK_THAT(density_score(a, b), Catch::Matchers::WithinAbs(density_score(b, a), 1e-12));
  CHECK_THAT(corr_score(a, b), Catch::Matchers::WithinAbs(corr_score(b, a), 1e-12));
  CHECK(density_score(a, b) < 1.0);
  CHECK(density_score(a, b) > 0.8);  // same generator, modest sample noise
}

TEST_CASE("constant column pairs are skipped and reported") {
  Table a = mixed_table(100, 8);
  Table b = a;
  for (auto& row : b.values) row[1] = 0.0;  // constant in b only
  FidelityReport rep;
  const double c = corr_score(a, b, &rep);
  CHECK(c <= 1.0);
  CHECK(rep.skipped_pairs.size() == 3);  // pairs (0,1), (1,2), (1,3)

  Table c2 = a;
  for (auto& row : c2.values)
    for (int j = 0; j < 4; ++j) row[j] = 1.0;
  CHECK_THROWS_AS(corr_score(a, c2), std::invalid_argument);
}

TEST_CASE("schema mismatches are rejected") {
  Table a = mixed_table(50, 9);
  Table b = a;
  b.schema[0].name = "renamed";
  CHECK_THROWS_AS(density_score(a, b), std::invalid_argument);
  Table c = a;
  c.schema.pop_back();
  for (auto& row : c.values) row.pop_back();
  CHECK_THROWS_AS(density_score(a, c), std::invalid_argument);
}

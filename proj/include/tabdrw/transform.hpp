#pragma once

// Step-1 / Step-3 machinery: extract the watermark columns, optionally apply
// the keyed privacy permutation, Yeo-Johnson-transform and standardize each
// column, and invert the whole thing after the spectral edit.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabdrw/table.hpp"
#include "tabdrw/yeo_johnson.hpp"

namespace tabdrw {

struct YjColumnParams {
  double lambda = 1.0;
  double mean = 0.0;
  double std = 1.0;
};

struct TransformState {
  std::vector<int> columns;            // watermark column indices into the table
  std::vector<int> permutation;        // bijection on 0..p-1; empty means identity
  std::vector<YjColumnParams> params;  // one per working column, post-permutation order
  bool refit = true;

  int p() const { return int(columns.size()); }
};

using Matrix = std::vector<std::vector<double>>;

namespace detail {

// Population mean/std accumulated over a value-sorted copy, so the result is
// bit-identical under any row permutation of the input.
inline void sorted_mean_std(std::vector<double> v, double& mean, double& sd) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / double(v.size());
  double q = 0.0;
  for (double x : v) q += (x - mean) * (x - mean);
  sd = std::sqrt(q / double(v.size()));
}

inline void validate_state(const Table& t, const TransformState& st) {
  const int p = st.p();
  if (p < 2) throw std::invalid_argument("transform: need at least 2 watermark columns");
  std::vector<bool> seen_col(t.cols(), false);
  for (int c : st.columns) {
    if (c < 0 || c >= int(t.cols()) || seen_col[c])
      throw std::invalid_argument("transform: invalid or duplicate watermark column index");
    seen_col[c] = true;
  }
  if (!st.permutation.empty()) {
    if (int(st.permutation.size()) != p)
      throw std::invalid_argument("transform: permutation size mismatch");
    std::vector<bool> seen(p, false);
    for (int v : st.permutation) {
      if (v < 0 || v >= p || seen[v]) throw std::invalid_argument("transform: not a permutation");
      seen[v] = true;
    }
  }
}

}  // namespace detail

// Transform the watermark columns of `t` into the standardized domain.
// Working column j is table column st.columns[st.permutation[j]] (identity
// permutation when unset). In refit mode lambda is fitted per column by MLE
// and mean/std are the sample statistics of the transformed column; in
// frozen mode all parameters come from the template. Zero-variance columns
// are rejected in refit mode; in frozen mode a sub-positive stored std is
// guarded to 1.
inline std::pair<Matrix, TransformState> fit_transform(const Table& t,
                                                       const TransformState& state_template) {
  detail::validate_state(t, state_template);
  TransformState st = state_template;
  const int p = st.p();
  const std::size_t n = t.rows();

  Matrix z(n, std::vector<double>(p));
  if (st.refit) st.params.assign(p, YjColumnParams{});
  if (int(st.params.size()) != p)
    throw std::invalid_argument("transform: frozen state lacks per-column parameters");

  std::vector<double> col(n);
  for (int j = 0; j < p; ++j) {
    const int src = st.columns[st.permutation.empty() ? j : st.permutation[j]];
    for (std::size_t i = 0; i < n; ++i) col[i] = t.values[i][src];

    YjColumnParams& prm = st.params[j];
    if (st.refit) {
      prm.lambda = fit_lambda(col);  // throws on constant columns
      std::vector<double> psi(n);
      for (std::size_t i = 0; i < n; ++i) psi[i] = yj_forward(col[i], prm.lambda);
      detail::sorted_mean_std(psi, prm.mean, prm.std);
      if (!(prm.std > 0.0)) throw std::invalid_argument("transform: zero-variance column");
      for (std::size_t i = 0; i < n; ++i) z[i][j] = (psi[i] - prm.mean) / prm.std;
    } else {
      const double sd = prm.std > 0.0 ? prm.std : 1.0;
      for (std::size_t i = 0; i < n; ++i)
        z[i][j] = (yj_forward(col[i], prm.lambda) - prm.mean) / sd;
    }
  }
  return {std::move(z), std::move(st)};
}

// Map a standardized matrix back into table values (un-standardize, inverse
// YJT, un-permute) and write the result into a copy of `base`'s watermark
// columns. Non-watermark columns are left untouched.
inline Table inverse_transform(const Matrix& z, const TransformState& st, const Table& base) {
  detail::validate_state(base, st);
  const int p = st.p();
  if (!z.empty() && int(z[0].size()) != p)
    throw std::invalid_argument("inverse_transform: column count mismatch");
  if (z.size() != base.rows())
    throw std::invalid_argument("inverse_transform: row count mismatch");

  Table out = base;
  for (int j = 0; j < p; ++j) {
    const int dst = st.columns[st.permutation.empty() ? j : st.permutation[j]];
    const YjColumnParams& prm = st.params.at(j);
    const double sd = prm.std > 0.0 ? prm.std : 1.0;
    for (std::size_t i = 0; i < z.size(); ++i)
      out.values[i][dst] = yj_inverse(z[i][j] * sd + prm.mean, prm.lambda);
  }
  return out;
}

// --- flat key=value serialization so embedder and detector can share frozen
// --- states across processes

inline void write_transform_state(const TransformState& st, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto fmt = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "refit=" << (st.refit ? 1 : 0) << "\n";
  out << "columns=";
  for (std::size_t i = 0; i < st.columns.size(); ++i) out << (i ? "," : "") << st.columns[i];
  out << "\n";
  out << "permutation=";
  for (std::size_t i = 0; i < st.permutation.size(); ++i)
    out << (i ? "," : "") << st.permutation[i];
  out << "\n";
  for (std::size_t j = 0; j < st.params.size(); ++j) {
    out << "col." << j << ".lambda=" << fmt(st.params[j].lambda) << "\n";
    out << "col." << j << ".mean=" << fmt(st.params[j].mean) << "\n";
    out << "col." << j << ".std=" << fmt(st.params[j].std) << "\n";
  }
}

inline TransformState read_transform_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  TransformState st;
  std::string line;
  auto parse_ints = [](const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
  };
  while (std::getline(in, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "refit") {
      st.refit = (val == "1");
    } else if (key == "columns") {
      if (!val.empty()) st.columns = parse_ints(val);
    } else if (key == "permutation") {
      if (!val.empty()) st.permutation = parse_ints(val);
    } else if (key.rfind("col.", 0) == 0) {
      auto dot = key.find('.', 4);
      std::size_t j = std::stoul(key.substr(4, dot - 4));
      if (st.params.size() <= j) st.params.resize(j + 1);
      std::string field = key.substr(dot + 1);
      double v = std::stod(val);
      if (field == "lambda")
        st.params[j].lambda = v;
      else if (field == "mean")
        st.params[j].mean = v;
      else if (field == "std")
        st.params[j].std = v;
    }
  }
  return st;
}

}  // namespace tabdrw

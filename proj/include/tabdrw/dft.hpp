#pragma once

// Row-wise unitary discrete Fourier transform, evaluated as the direct
// O(p^2) sum:
//   y_t = (1/sqrt(p)) sum_n x_n e^{-i 2 pi t n / p}
//   x_n = (1/sqrt(p)) sum_t y_t e^{+i 2 pi t n / p}
// p is a column count (tens, not millions), so the direct sum with an exact
// twiddle table beats any FFT in simplicity and matches the unitary
// normalization exactly.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace tabdrw {

struct SpectralRow {
  std::vector<std::complex<double>> y;  // length p
  int m = 0;                            // effective entries: m = floor((p-1)/2)

  int p() const { return int(y.size()); }
};

// Twiddle table shared by all rows of one table: cos/sin of 2 pi k / p.
class DftPlan {
 public:
  explicit DftPlan(int p) : p_(p), cos_(p), sin_(p) {
    if (p < 2) throw std::invalid_argument("DftPlan: p must be >= 2");
    for (int k = 0; k < p; ++k) {
      double a = 2.0 * M_PI * double(k) / double(p);
      cos_[k] = std::cos(a);
      sin_[k] = std::sin(a);
    }
    inv_sqrt_p_ = 1.0 / std::sqrt(double(p));
  }

  SpectralRow forward(const double* x) const {
    SpectralRow out;
    out.y.resize(p_);
    out.m = (p_ - 1) / 2;
    for (int t = 0; t < p_; ++t) {
      double re = 0.0, im = 0.0;
      std::size_t idx = 0;
      for (int n = 0; n < p_; ++n) {
        re += x[n] * cos_[idx];
        im -= x[n] * sin_[idx];
        idx += t;
        if (idx >= std::size_t(p_)) idx -= p_;
      }
      out.y[t] = {re * inv_sqrt_p_, im * inv_sqrt_p_};
    }
    return out;
  }

  // Inverse transform of a conjugate-symmetric spectrum back to a real row.
  // The imaginary residue must stay below `tol` (default 1e-8), otherwise
  // the input was not a valid real-signal spectrum.
  std::vector<double> inverse(const SpectralRow& s, double tol = 1e-8) const {
    if (s.p() != p_) throw std::invalid_argument("idft: spectrum length mismatch");
    std::vector<double> x(p_);
    for (int n = 0; n < p_; ++n) {
      double re = 0.0, im = 0.0;
      std::size_t idx = 0;
      for (int t = 0; t < p_; ++t) {
        const double a = s.y[t].real(), b = s.y[t].imag();
        re += a * cos_[idx] - b * sin_[idx];
        im += a * sin_[idx] + b * cos_[idx];
        idx += n;
        if (idx >= std::size_t(p_)) idx -= p_;
      }
      if (std::abs(im) * inv_sqrt_p_ > tol)
        throw std::domain_error("idft: spectrum is not conjugate-symmetric");
      x[n] = re * inv_sqrt_p_;
    }
    return x;
  }

  int p() const { return p_; }

 private:
  int p_;
  std::vector<double> cos_, sin_;
  double inv_sqrt_p_;
};

inline SpectralRow dft_row(const std::vector<double>& x) {
  return DftPlan(int(x.size())).forward(x.data());
}

inline std::vector<double> idft_row(const SpectralRow& y) {
  return DftPlan(y.p()).inverse(y);
}

}  // namespace tabdrw

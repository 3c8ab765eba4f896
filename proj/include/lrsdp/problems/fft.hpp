#pragma once
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "lrsdp/core/types.hpp"

namespace lrsdp {

inline bool is_power_of_two(Eigen::Index n) {
  return n >= 1 && (n & (n - 1)) == 0;
}

// In-place radix-2 discrete Fourier transform with the convention
// X_l = Σ_k x_k e^{−2πi kl/n}; the inverse includes the 1/n normalization so
// inverse(forward(x)) = x. Twiddle factors come from one table of direct
// std::polar evaluations, keeping the error of every butterfly at the
// round-off level instead of accumulating along repeated multiplications.
inline void fft_radix2(Vec<Complex>& a, bool inverse) {
  const Eigen::Index n = a.size();
  require(is_power_of_two(n), "transform length must be a power of two");
  if (n == 1) return;

  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j |= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  const double sign = inverse ? 2.0 : -2.0;
  std::vector<Complex> root(static_cast<std::size_t>(n / 2));
  for (Eigen::Index k = 0; k < n / 2; ++k)
    root[static_cast<std::size_t>(k)] =
        std::polar(1.0, sign * std::numbers::pi * double(k) / double(n));

  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const Eigen::Index stride = n / len;
    for (Eigen::Index i = 0; i < n; i += len) {
      for (Eigen::Index k = 0; k < len / 2; ++k) {
        const Complex w = root[static_cast<std::size_t>(k * stride)];
        const Complex u = a[i + k];
        const Complex t = w * a[i + k + len / 2];
        a[i + k] = u + t;
        a[i + k + len / 2] = u - t;
      }
    }
  }
  if (inverse) a /= static_cast<double>(n);
}

inline Vec<Complex> fft(const Vec<Complex>& x) {
  Vec<Complex> a = x;
  fft_radix2(a, false);
  return a;
}

inline Vec<Complex> ifft(const Vec<Complex>& x) {
  Vec<Complex> a = x;
  fft_radix2(a, true);
  return a;
}

}  // namespace lrsdp

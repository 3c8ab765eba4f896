#pragma once
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "lrsdp/core/rng.hpp"
#include "lrsdp/core/types.hpp"
#include "lrsdp/problems/fft.hpp"

namespace lrsdp {

inline constexpr int kDiffractionMasks = 12;

// Coded-diffraction measurement model: 12 random modulation masks y_j over a
// power-of-two signal length n, with one measurement per (mask, frequency)
// pair: b_{(j,l)} = |DFT(y_j ∘ x)_l|² for the hidden signal x.
struct DiffractionModel {
  Eigen::Index n = 0;
  std::vector<Vec<Complex>> masks;    // 12 vectors of length n
  RealVec b;                          // 12·n nonnegative measurements
  std::optional<Vec<Complex>> truth;  // generating signal when synthetic
};

inline void validate_model(const DiffractionModel& model) {
  require(is_power_of_two(model.n), "signal length must be a power of two");
  require(static_cast<int>(model.masks.size()) == kDiffractionMasks,
          "model needs exactly 12 masks");
  for (const auto& y : model.masks)
    require(y.size() == model.n, "mask length does not match signal length");
  require(model.b.size() == kDiffractionMasks * model.n,
          "measurement vector has wrong length");
  require((model.b.array() >= 0.0).all(), "measurements must be nonnegative");
  if (model.truth)
    require(model.truth->size() == model.n, "ground truth has wrong length");
}

// Forward measurement map on a vector: out_{(j,l)} = |DFT(y_j ∘ v)_l|².
inline RealVec diffraction_measure(const std::vector<Vec<Complex>>& masks,
                                   const Vec<Complex>& v) {
  const Eigen::Index n = v.size();
  RealVec out(static_cast<Eigen::Index>(masks.size()) * n);
  Vec<Complex> w(n);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    w = masks[j].cwiseProduct(v);
    fft_radix2(w, false);
    out.segment(static_cast<Eigen::Index>(j) * n, n) = w.cwiseAbs2();
  }
  return out;
}

// Phase-retrieval SDP: minimize tr X subject to the 12n rank-one diffraction
// measurements A_{(j,l)}•X = b_{(j,l)}, with trace bound τ = 3n. Both the
// constraint map and its adjoint ride on the radix-2 transform:
//   A(vvᴴ)_{(j,l)} = |DFT(y_j ∘ v)_l|²,
//   (A*p)v = Σ_j ȳ_j ∘ n·IDFT(p_j ∘ DFT(y_j ∘ v)).
inline SdpProblem<Complex> build_phase_retrieval(const DiffractionModel& model) {
  validate_model(model);
  const Eigen::Index n = model.n;

  SdpProblem<Complex> P;
  P.n = n;
  P.m = kDiffractionMasks * n;
  P.tau = 3.0 * static_cast<double>(n);
  P.b = model.b;
  P.objective_scale = 1.0;
  P.kind = "phaseretrieval";

  auto masks = std::make_shared<const std::vector<Vec<Complex>>>(model.masks);

  P.c_apply = [](const Vec<Complex>& v) { return v; };
  P.q_A = [masks](const Vec<Complex>& v) {
    return diffraction_measure(*masks, v);
  };
  P.adjoint_apply = [masks, n](const RealVec& p, const Vec<Complex>& v) {
    Vec<Complex> out = Vec<Complex>::Zero(n);
    Vec<Complex> w(n);
    for (int j = 0; j < kDiffractionMasks; ++j) {
      const Vec<Complex>& y = (*masks)[static_cast<std::size_t>(j)];
      w = y.cwiseProduct(v);
      fft_radix2(w, false);
      w.array() *= p.segment(static_cast<Eigen::Index>(j) * n, n).array();
      fft_radix2(w, true);
      out += static_cast<double>(n) * y.conjugate().cwiseProduct(w);
    }
    return out;
  };
  return P;
}

// Synthetic instance: mask entries are (phase uniform on {1, i, −1, −i}) ×
// (modulus √2/2 with probability 4/5, √3 with probability 1/5); the hidden
// signal has independent standard complex normal entries; b applies the
// measurement map to it. Bit-reproducible for a fixed seed.
inline DiffractionModel generate_phase_retrieval(Eigen::Index n,
                                                 std::uint64_t seed) {
  require(is_power_of_two(n), "signal length must be a power of two");
  const double mod_low = std::sqrt(2.0) / 2.0;
  const double mod_high = std::sqrt(3.0);

  DiffractionModel model;
  model.n = n;
  model.masks.reserve(kDiffractionMasks);
  for (int j = 0; j < kDiffractionMasks; ++j) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(j)));
    Vec<Complex> y(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const std::uint64_t phase = rng.uniform_below(4);
      const double mod = rng.uniform() < 0.8 ? mod_low : mod_high;
      switch (phase) {
        case 0: y[k] = Complex(mod, 0.0); break;
        case 1: y[k] = Complex(0.0, mod); break;
        case 2: y[k] = Complex(-mod, 0.0); break;
        default: y[k] = Complex(0.0, -mod); break;
      }
    }
    model.masks.push_back(std::move(y));
  }

  Rng rng(mix_seed(seed, kDiffractionMasks));
  Vec<Complex> x(n);
  const double inv_sqrt2 = std::sqrt(0.5);
  for (Eigen::Index k = 0; k < n; ++k) x[k] = inv_sqrt2 * rng.cnormal();

  model.b = diffraction_measure(model.masks, x);
  model.truth = std::move(x);
  return model;
}

}  // namespace lrsdp

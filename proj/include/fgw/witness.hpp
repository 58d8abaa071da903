#pragma once

// Fidelity witness for a pure Gaussian target ρ_t = U|ω⟩⟨ω|U†,
//
//   W = U (1 - n^(ω)) U†,   F_W(ρ_p) = tr[W ρ_p] = 1 - L/2 + tr[M_pᵀ M_t] / 4,
//
// evaluated entirely from covariance matrices.

#include <cmath>
#include <compare>
#include <cstdint>
#include <vector>

#include "fgw/flo_core.hpp"

namespace fgw {

/// Majorana index pair, 1-based, j < k.
struct MajoranaPair {
  int j = 0;
  int k = 0;
  auto operator<=>(const MajoranaPair&) const = default;
};

inline constexpr double kDefaultTau = 1e-12;

/// Upper-triangle pairs on which the target covariance is (numerically) nonzero.
struct SupportSet {
  std::vector<MajoranaPair> pairs;
  double tau = kDefaultTau;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  bool contains(MajoranaPair p) const { return std::binary_search(pairs.begin(), pairs.end(), p); }
};

struct WitnessReport {
  double f_w = 0.0;
  double overlap_x = 0.0;  // tr[M_pᵀ M_t]
  double abs_sum = 0.0;    // Σ_Ω |M_t[j,k]|
  int l = 0;
  std::size_t omega_size = 0;
  double tau = kDefaultTau;
  /// Entries dropped from Ω can shift an estimate by at most 2L²τ.
  double tau_bias_bound = 0.0;
};

struct CertificationParams {
  double threshold = 0.0;    // F_T
  double gap = 0.0;          // Δ
  double max_error = 0.0;    // ε
  double failure_prob = 0.0; // δ

  void validate() const {
    auto bad = [](const std::string& why) { throw Error(ErrorKind::InvalidParams, why); };
    if (!(threshold > 0.0 && threshold < 1.0)) bad("threshold must lie in (0, 1)");
    if (!(failure_prob > 0.0 && failure_prob < 1.0)) bad("failure probability must lie in (0, 1)");
    if (!(max_error > 0.0 && max_error < (1.0 - threshold) / 2.0)) bad("need 0 < epsilon < (1 - F_T) / 2");
    if (!(gap > 2.0 * max_error && gap < 1.0 - threshold)) bad("need 2 epsilon < gap < 1 - F_T");
  }
};

enum class Decision { Accept, Reject };

inline const char* to_string(Decision d) { return d == Decision::Accept ? "Accept" : "Reject"; }

inline SupportSet support_set(const CovarianceMatrix& target, double tau = kDefaultTau) {
  if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidParams, "tau must be >= 0");
  SupportSet s;
  s.tau = tau;
  const int n = target.dim();
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c)
      if (std::abs(target(r, c)) > tau) s.pairs.push_back({r + 1, c + 1});
  return s;
}

inline double abs_sum(const CovarianceMatrix& target, const SupportSet& omega) {
  double total = 0.0;
  for (const auto& p : omega.pairs) total += std::abs(target(p.j - 1, p.k - 1));
  return total;
}

/// Witness value for a preparation covariance `prep` (any antisymmetric
/// matrix; finite-sample estimates need not be valid covariances).
inline WitnessReport witness_value(const SkewMatrix& prep, const CovarianceMatrix& target,
                                   double tau = kDefaultTau) {
  if (prep.dim() != target.dim()) throw Error(ErrorKind::InvalidDimension, "preparation and target dimensions differ");
  if (!target.is_pure(tol::kPurityEvolved)) throw Error(ErrorKind::NotPure, "target covariance is not pure");
  const int l = target.modes();
  const SupportSet omega = support_set(target, tau);

  WitnessReport r;
  r.l = l;
  r.overlap_x = prep.matrix().cwiseProduct(target.matrix()).sum();
  r.f_w = 1.0 - 0.5 * l + 0.25 * r.overlap_x;
  r.abs_sum = abs_sum(target, omega);
  r.omega_size = omega.size();
  r.tau = tau;
  r.tau_bias_bound = 2.0 * l * l * tau;
  return r;
}

inline WitnessReport witness_value(const CovarianceMatrix& prep, const CovarianceMatrix& target,
                                   double tau = kDefaultTau) {
  return witness_value(prep.skew(), target, tau);
}

namespace detail {
// ceil() that does not round x·(1 + 1 ulp) up to the next integer.
inline std::uint64_t stable_ceil(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(x));
}
}  // namespace detail

/// Runs needed by importance sampling: ⌈ln(2/δ)·|M_t|² / (2ε²)⌉.
inline std::uint64_t sample_complexity(double epsilon, double delta, double abs_sum_value) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParams, "epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorKind::InvalidParams, "delta must lie in (0, 1)");
  return detail::stable_ceil(std::log(2.0 / delta) * abs_sum_value * abs_sum_value / (2.0 * epsilon * epsilon));
}

struct EntrywiseBudget {
  std::uint64_t per_observable = 0;  // η
  std::uint64_t total = 0;           // 4Lη
};

/// Measuring every pair of Ω the same number of times:
/// η = ⌈ε⁻² L³ ln(2|Ω|/δ)⌉ and N = 4Lη.
inline EntrywiseBudget entrywise_sample_complexity(double epsilon, double delta, int l, std::size_t omega_size) {
  if (!(epsilon > 0.0)) throw Error(ErrorKind::InvalidParams, "epsilon must be > 0");
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidParams, "delta must be > 0");
  if (l < 1 || omega_size == 0) throw Error(ErrorKind::InvalidParams, "need L >= 1 and a nonempty support");
  const double cube = static_cast<double>(l) * l * l;
  const double eta = cube * std::log(2.0 * static_cast<double>(omega_size) / delta) / (epsilon * epsilon);
  EntrywiseBudget b;
  b.per_observable = std::max<std::uint64_t>(1, detail::stable_ceil(eta));
  b.total = 4ULL * static_cast<std::uint64_t>(l) * b.per_observable;
  return b;
}

/// Lipschitz bound |F_W - F_W*| ≤ 2^{-1/2} L^{3/2} ‖M - M*‖_max.
inline double stability_bound(double maxnorm_error, int l) {
  if (!(maxnorm_error >= 0.0)) throw Error(ErrorKind::InvalidParams, "max-norm error must be >= 0");
  return std::pow(static_cast<double>(l), 1.5) * maxnorm_error / std::sqrt(2.0);
}

/// Mismatch content n_⊥ = tr[n^(ω) U† ρ_p U], read off M̃ = Qᵀ M_p Q through
/// ⟨n_k⟩ = (1 + M̃[2k-1, 2k]) / 2.
inline double mismatch(const SkewMatrix& prep, const ModeRotation& q, const FockString& omega) {
  if (prep.dim() != q.dim() || omega.modes() * 2 != prep.dim()) {
    throw Error(ErrorKind::InvalidDimension, "mismatch inputs have inconsistent dimensions");
  }
  const Matrix rotated = q.matrix().transpose() * prep.matrix() * q.matrix();
  double total = 0.0;
  for (int k = 0; k < omega.modes(); ++k) {
    const double occupation = 0.5 * (1.0 + rotated(2 * k, 2 * k + 1));
    total += omega[k] == 0 ? occupation : 1.0 - occupation;
  }
  return total;
}

inline double mismatch(const CovarianceMatrix& prep, const ModeRotation& q, const FockString& omega) {
  return mismatch(prep.skew(), q, omega);
}

/// (1 - F_T - 2ε) / (1 - F_T - Δ): preparations with n_⊥ at or below this
/// are guaranteed acceptance once F ≥ F_T + Δ.
inline double mismatch_threshold(const CertificationParams& params) {
  params.validate();
  return (1.0 - params.threshold - 2.0 * params.max_error) / (1.0 - params.threshold - params.gap);
}

/// Accept iff F_W* ≥ F_T + ε.
inline Decision robust_test(double f_w_estimate, const CertificationParams& params) {
  params.validate();
  return f_w_estimate >= params.threshold + params.max_error ? Decision::Accept : Decision::Reject;
}

}  // namespace fgw

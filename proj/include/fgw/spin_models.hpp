#pragma once

// Jordan-Wigner layer for open XY / transverse-field Ising chains
//
//   H = -Σ_k (Jx_k σ^x_k σ^x_{k+1} + Jy_k σ^y_k σ^y_{k+1}) - Σ_k B_k σ^z_k
//
// with m_{2k-1} = (Π_{j<k} σ^z_j) σ^x_k and m_{2k} = (Π_{j<k} σ^z_j) σ^y_k.
// Spin up on every site is the Fock state ω = 0…0.

#include <complex>
#include <string>
#include <vector>

#include "fgw/flo_core.hpp"

namespace fgw {

struct ChainParams {
  int sites = 0;
  std::vector<double> jx;  // L-1 bonds
  std::vector<double> jy;  // L-1 bonds
  std::vector<double> b;   // L sites

  static ChainParams uniform(int sites, double jx, double b, double jy = 0.0) {
    if (sites < 1) throw Error(ErrorKind::InvalidDimension, "chain needs at least one site");
    const auto bonds = static_cast<std::size_t>(sites - 1);
    return ChainParams{sites, std::vector<double>(bonds, jx), std::vector<double>(bonds, jy),
                       std::vector<double>(static_cast<std::size_t>(sites), b)};
  }

  void validate() const {
    if (sites < 1) throw Error(ErrorKind::InvalidDimension, "chain needs at least one site");
    const auto bonds = static_cast<std::size_t>(sites - 1);
    if (jx.size() != bonds || jy.size() != bonds || b.size() != static_cast<std::size_t>(sites)) {
      throw Error(ErrorKind::InvalidDimension, "coupling lengths inconsistent with L = " + std::to_string(sites));
    }
    for (const auto* v : {&jx, &jy, &b})
      for (double x : *v)
        if (!std::isfinite(x)) throw Error(ErrorKind::InvalidParams, "non-finite chain parameter");
  }

  /// Same chain with every field switched off (the J-only part of the Trotter split).
  ChainParams bonds_only() const {
    ChainParams p = *this;
    std::fill(p.b.begin(), p.b.end(), 0.0);
    return p;
  }

  /// Same chain with every bond switched off.
  ChainParams field_only() const {
    ChainParams p = *this;
    std::fill(p.jx.begin(), p.jx.end(), 0.0);
    std::fill(p.jy.begin(), p.jy.end(), 0.0);
    return p;
  }
};

struct QuenchSpec {
  ChainParams params;
  double t = 0.0;
  int trotter_steps = 0;  // 0 = continuous evolution
  FockString omega;

  void validate() const {
    params.validate();
    if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::InvalidParams, "evolution time must be finite and >= 0");
    if (trotter_steps < 0) throw Error(ErrorKind::InvalidParams, "negative Trotter step count");
    if (omega.modes() != params.sites) throw Error(ErrorKind::InvalidDimension, "omega length differs from L");
  }
};

enum class PauliAxis : char { X = 'x', Y = 'y', Z = 'z' };

struct PauliFactor {
  int site = 0;  // 1-based
  PauliAxis axis = PauliAxis::Z;
  bool operator==(const PauliFactor&) const = default;
};

enum class Phase { PlusOne, MinusOne, PlusI, MinusI };

inline std::complex<double> to_complex(Phase p) {
  switch (p) {
    case Phase::PlusOne: return {1.0, 0.0};
    case Phase::MinusOne: return {-1.0, 0.0};
    case Phase::PlusI: return {0.0, 1.0};
    case Phase::MinusI: return {0.0, -1.0};
  }
  return {0.0, 0.0};
}

/// phase · Π factors, sites strictly increasing.
struct PauliString {
  std::vector<PauliFactor> factors;
  Phase phase = Phase::PlusOne;

  std::string to_string() const {
    static const char* names[] = {"+", "-", "+i", "-i"};
    std::string s = names[static_cast<int>(phase)];
    for (const auto& f : factors) {
      s += " ";
      s += static_cast<char>(f.axis);
      s += std::to_string(f.site);
    }
    return s;
  }
};

/// Coupling matrix A with H = (i/4) Σ A_jk m_j m_k. In 1-based Majorana
/// labels the upper-triangle entries are A[2k-1,2k] = 2B_k,
/// A[2k,2k+1] = 2Jx_k and A[2k-1,2k+2] = -2Jy_k.
inline SkewMatrix xy_coupling_matrix(const ChainParams& params) {
  params.validate();
  const int l = params.sites;
  Matrix a = Matrix::Zero(2 * l, 2 * l);
  for (int k = 0; k < l; ++k) a(2 * k, 2 * k + 1) = 2.0 * params.b[k];
  for (int k = 0; k + 1 < l; ++k) {
    a(2 * k + 1, 2 * k + 2) = 2.0 * params.jx[k];
    a(2 * k, 2 * k + 3) = -2.0 * params.jy[k];
  }
  return SkewMatrix::antisymmetrized(a - a.transpose());
}

/// m_j m_k = phase · P for 1-based Majorana labels j < k.
inline PauliString majorana_pair_pauli_string(int j, int k) {
  if (j < 1) throw Error(ErrorKind::InvalidIndexOrder, "Majorana labels start at 1");
  if (j >= k) throw Error(ErrorKind::InvalidIndexOrder, "need j < k, got (" + std::to_string(j) + ", " + std::to_string(k) + ")");
  const int site_j = (j + 1) / 2;
  const int site_k = (k + 1) / 2;
  const bool j_odd = j % 2 == 1;
  const bool k_odd = k % 2 == 1;

  PauliString out;
  if (site_j == site_k) {
    // σ^x σ^y = i σ^z
    out.factors.push_back({site_j, PauliAxis::Z});
    out.phase = Phase::PlusI;
    return out;
  }
  // σ^x σ^z = -i σ^y, σ^y σ^z = i σ^x
  out.factors.push_back({site_j, j_odd ? PauliAxis::Y : PauliAxis::X});
  out.phase = j_odd ? Phase::MinusI : Phase::PlusI;
  for (int s = site_j + 1; s < site_k; ++s) out.factors.push_back({s, PauliAxis::Z});
  out.factors.push_back({site_k, k_odd ? PauliAxis::X : PauliAxis::Y});
  return out;
}

/// Continuous-time propagator exp(t A(params)). Ignores trotter_steps.
inline ModeRotation quench_rotation(const QuenchSpec& spec) {
  spec.validate();
  return skew_exp(xy_coupling_matrix(spec.params), spec.t);
}

/// Mode-space image of U_T = (exp(-iΔt H_B) exp(-iΔt H_J))^T.
///
/// The Heisenberg action of a product U_B U_J composes as Q_B · Q_J, so one
/// step is exp(Δt A_B) · exp(Δt A_J).
inline ModeRotation trotter_rotation(const QuenchSpec& spec) {
  spec.validate();
  if (spec.trotter_steps < 1) {
    throw Error(ErrorKind::ContractViolation, "trotter_rotation needs T >= 1; use quench_rotation for T = 0");
  }
  const double dt = spec.t / spec.trotter_steps;
  const ModeRotation field = skew_exp(xy_coupling_matrix(spec.params.field_only()), dt);
  const ModeRotation bonds = skew_exp(xy_coupling_matrix(spec.params.bonds_only()), dt);
  return power(field * bonds, spec.trotter_steps);
}

/// Q M_ω Qᵀ with Q continuous (T = 0) or Trotterized (T >= 1).
inline CovarianceMatrix quench_target(const QuenchSpec& spec) {
  spec.validate();
  const ModeRotation q = spec.trotter_steps == 0 ? quench_rotation(spec) : trotter_rotation(spec);
  return conjugate(fock_covariance(spec.omega), q);
}

/// Ground state of the chain Hamiltonian.
inline CovarianceMatrix chain_ground_state(const ChainParams& params) {
  return ground_state_covariance(xy_coupling_matrix(params));
}

}  // namespace fgw

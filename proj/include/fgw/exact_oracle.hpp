#pragma once

// Brute-force 2^L-dimensional reference used to cross-check the covariance
// matrix formalism. Site 1 is the most significant tensor factor and
// |0⟩ = |↑⟩, so the computational basis state with bits ω is the Fock state |ω⟩.

#include <complex>
#include <vector>

#include "fgw/random.hpp"
#include "fgw/spin_models.hpp"

namespace fgw::oracle {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

inline constexpr int kDefaultCap = 8;
inline constexpr int kMaxCap = 10;

inline void check_cap(int l, int cap) {
  if (cap > kMaxCap) throw Error(ErrorKind::OracleCapExceeded, "oracle cap may not exceed " + std::to_string(kMaxCap));
  if (l < 1 || l > cap) {
    throw Error(ErrorKind::OracleCapExceeded, "L = " + std::to_string(l) + " exceeds oracle cap " + std::to_string(cap));
  }
}

/// Complex 2^L × 2^L operator.
struct DenseOperator {
  int modes = 0;
  ComplexMatrix m;

  int dim() const { return static_cast<int>(m.rows()); }
};

/// Density matrix, validated on construction.
class DenseState {
 public:
  DenseState() = default;

  static DenseState from(int modes, ComplexMatrix rho) {
    const Eigen::Index dim = Eigen::Index{1} << modes;
    if (rho.rows() != dim || rho.cols() != dim) throw Error(ErrorKind::InvalidDimension, "density matrix is not 2^L square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorKind::InvalidData, "density matrix not Hermitian");
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12) throw Error(ErrorKind::InvalidData, "density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) throw Error(ErrorKind::InvalidData, "density matrix is not positive");
    DenseState s;
    s.modes_ = modes;
    s.rho_ = std::move(rho);
    return s;
  }

  static DenseState pure(int modes, const Vector& psi) {
    const Vector v = psi / psi.norm();
    ComplexMatrix rho = v * v.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return from(modes, std::move(rho));
  }

  int modes() const { return modes_; }
  const ComplexMatrix& rho() const { return rho_; }
  bool is_pure(double tolerance = 1e-10) const { return std::abs((rho_ * rho_).trace().real() - 1.0) <= tolerance; }

 private:
  int modes_ = 0;
  ComplexMatrix rho_;
};

namespace detail {

inline ComplexMatrix pauli(char axis) {
  ComplexMatrix p(2, 2);
  switch (axis) {
    case 'x': p << 0, 1, 1, 0; break;
    case 'y': p << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'z': p << 1, 0, 0, -1; break;
    default: p = ComplexMatrix::Identity(2, 2);
  }
  return p;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

// ⊗_s factor[s], factor given as axis characters ('i' for identity).
inline ComplexMatrix product_operator(const std::vector<char>& axes) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char a : axes) out = kron(out, pauli(a));
  return out;
}

// f(H) for Hermitian H through its eigendecomposition.
template <class F>
ComplexMatrix hermitian_function(const ComplexMatrix& h, F f) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::NumericalFailure, "Hermitian eigensolver failed");
  Eigen::VectorXcd d(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Single-site Pauli operator σ^axis_site (1-based site) on L sites.
inline DenseOperator pauli_on_site(int site, char axis, int l) {
  std::vector<char> axes(l, 'i');
  axes[site - 1] = axis;
  return {l, detail::product_operator(axes)};
}

/// Jordan-Wigner Majorana operator m_index, 1 ≤ index ≤ 2L.
inline DenseOperator jw_majorana(int index, int l, int cap = kDefaultCap) {
  check_cap(l, cap);
  if (index < 1 || index > 2 * l) throw Error(ErrorKind::InvalidDimension, "Majorana index out of range");
  const int site = (index + 1) / 2;
  std::vector<char> axes(l, 'i');
  for (int s = 0; s + 1 < site; ++s) axes[s] = 'z';
  axes[site - 1] = index % 2 == 1 ? 'x' : 'y';
  return {l, detail::product_operator(axes)};
}

/// Matrix of a Pauli string including its phase.
inline DenseOperator pauli_string_matrix(const PauliString& p, int l) {
  std::vector<char> axes(l, 'i');
  for (const auto& f : p.factors) axes[f.site - 1] = static_cast<char>(f.axis);
  return {l, to_complex(p.phase) * detail::product_operator(axes)};
}

/// H_spin built directly from Pauli matrices.
inline DenseOperator spin_hamiltonian(const ChainParams& params, int cap = kDefaultCap) {
  params.validate();
  const int l = params.sites;
  check_cap(l, cap);
  const Eigen::Index dim = Eigen::Index{1} << l;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k + 1 < l; ++k) {
    std::vector<char> xx(l, 'i'), yy(l, 'i');
    xx[k] = xx[k + 1] = 'x';
    yy[k] = yy[k + 1] = 'y';
    h -= params.jx[k] * detail::product_operator(xx);
    h -= params.jy[k] * detail::product_operator(yy);
  }
  for (int k = 0; k < l; ++k) h -= params.b[k] * pauli_on_site(k + 1, 'z', l).m;
  return {l, h};
}

/// H(A) = (i/4) Σ_jk A_jk m_j m_k.
inline DenseOperator quadratic_hamiltonian(const SkewMatrix& a, int cap = kDefaultCap) {
  const int l = a.modes();
  check_cap(l, cap);
  std::vector<ComplexMatrix> m;
  for (int j = 1; j <= 2 * l; ++j) m.push_back(jw_majorana(j, l, cap).m);
  const Eigen::Index dim = Eigen::Index{1} << l;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int j = 0; j < 2 * l; ++j)
    for (int k = 0; k < 2 * l; ++k)
      if (a(j, k) != 0.0) h += Complex(0.0, 0.25 * a(j, k)) * (m[j] * m[k]);
  return {l, 0.5 * (h + h.adjoint())};
}

/// exp(-i t H) for Hermitian H.
inline DenseOperator evolution(const DenseOperator& h, double t) {
  return {h.modes, detail::hermitian_function(h.m, [t](double e) { return std::polar(1.0, -t * e); })};
}

/// Gaussian unitary exp(-i t H(A)).
inline DenseOperator gaussian_unitary(const SkewMatrix& a, double t, int cap = kDefaultCap) {
  return evolution(quadratic_hamiltonian(a, cap), t);
}

inline Vector fock_vector(const FockString& omega) {
  const int l = omega.modes();
  Eigen::Index index = 0;
  for (int k = 0; k < l; ++k) index = (index << 1) | omega[k];
  Vector v = Vector::Zero(Eigen::Index{1} << l);
  v(index) = 1.0;
  return v;
}

/// n^(ω) = Σ_k [(1-ω_k) n_k + ω_k (1 - n_k)]: diagonal, counts bits differing from ω.
inline DenseOperator flipped_number_operator(const FockString& omega) {
  const int l = omega.modes();
  const Eigen::Index dim = Eigen::Index{1} << l;
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    int flips = 0;
    for (int k = 0; k < l; ++k) flips += static_cast<int>((idx >> (l - 1 - k)) & 1) != omega[k];
    n(idx, idx) = flips;
  }
  return {l, n};
}

/// W = U (1 - n^(ω)) U†.
inline DenseOperator witness_operator(const DenseOperator& u, const FockString& omega) {
  if (u.modes != omega.modes()) throw Error(ErrorKind::InvalidDimension, "unitary and omega sizes differ");
  const ComplexMatrix id = ComplexMatrix::Identity(u.dim(), u.dim());
  if ((u.m * u.m.adjoint() - id).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::InvalidData, "witness_operator needs a unitary");
  }
  const ComplexMatrix w = u.m * (id - flipped_number_operator(omega).m) * u.m.adjoint();
  return {u.modes, 0.5 * (w + w.adjoint())};
}

/// W = 1 - Δ⁻¹ Σ λ_l P_l for a pure target and PSD P_l with ρ_t + Σ P_l = 1,
/// tr[ρ_t P_l] = 0 and 0 < Δ = λ_1 ≤ … ≤ λ_N.
inline DenseOperator general_witness(const DenseState& target, const std::vector<ComplexMatrix>& projectors,
                                     const std::vector<double>& weights) {
  auto bad = [](const std::string& why) { throw Error(ErrorKind::InvalidDecomposition, why); };
  if (!target.is_pure()) throw Error(ErrorKind::NotPure, "general_witness needs a pure target");
  if (projectors.empty() || projectors.size() != weights.size()) bad("need one weight per operator");
  if (!(weights.front() > 0.0)) bad("smallest weight must be positive");
  for (std::size_t i = 1; i < weights.size(); ++i)
    if (weights[i] < weights[i - 1]) bad("weights must be nondecreasing");
  const ComplexMatrix& rho = target.rho();
  const ComplexMatrix id = ComplexMatrix::Identity(rho.rows(), rho.cols());
  ComplexMatrix completeness = rho;
  ComplexMatrix weighted = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < projectors.size(); ++i) {
    const ComplexMatrix& p = projectors[i];
    if (p.rows() != rho.rows() || p.cols() != rho.cols()) bad("operator dimension mismatch");
    if (std::abs((rho * p).trace()) > 1e-10) bad("operator overlaps the target");
    completeness += p;
    weighted += weights[i] * p;
  }
  if ((completeness - id).cwiseAbs().maxCoeff() > 1e-10) bad("target and operators do not resolve the identity");
  const ComplexMatrix w = id - weighted / weights.front();
  return {target.modes(), 0.5 * (w + w.adjoint())};
}

/// tr[ρ_t ρ_p] for pure ρ_t.
inline double exact_fidelity(const DenseState& target, const DenseState& prep) {
  if (!target.is_pure()) throw Error(ErrorKind::NotPure, "exact_fidelity needs a pure target");
  return (target.rho() * prep.rho()).trace().real();
}

inline double expectation(const DenseOperator& op, const DenseState& state) {
  return (op.m * state.rho()).trace().real();
}

/// M_jk = (i/2) tr([m_j, m_k] ρ).
inline CovarianceMatrix covariance_from_state(const DenseState& state, int cap = kDefaultCap) {
  const int l = state.modes();
  check_cap(l, cap);
  std::vector<ComplexMatrix> m;
  for (int j = 1; j <= 2 * l; ++j) m.push_back(jw_majorana(j, l, cap).m);
  Matrix cov = Matrix::Zero(2 * l, 2 * l);
  for (int j = 0; j < 2 * l; ++j) {
    for (int k = j + 1; k < 2 * l; ++k) {
      const Complex v = Complex(0.0, 0.5) * ((m[j] * m[k] - m[k] * m[j]) * state.rho()).trace();
      if (std::abs(v.imag()) > 1e-10) throw Error(ErrorKind::NumericalFailure, "covariance entry is not real");
      cov(j, k) = v.real();
      cov(k, j) = -v.real();
    }
  }
  return CovarianceMatrix::from(SkewMatrix::antisymmetrized(cov));
}

/// U_T |ω⟩ with U_T = (exp(-iΔt H_B) exp(-iΔt H_J))^T, or exp(-i t H)|ω⟩ for T = 0.
inline DenseState exact_trotter_state(const QuenchSpec& spec, int cap = kDefaultCap) {
  spec.validate();
  const int l = spec.params.sites;
  check_cap(l, cap);
  Vector psi = fock_vector(spec.omega);
  if (spec.trotter_steps == 0) {
    psi = evolution(spin_hamiltonian(spec.params, cap), spec.t).m * psi;
  } else {
    const double dt = spec.t / spec.trotter_steps;
    const ComplexMatrix ub = evolution(spin_hamiltonian(spec.params.field_only(), cap), dt).m;
    const ComplexMatrix uj = evolution(spin_hamiltonian(spec.params.bonds_only(), cap), dt).m;
    const ComplexMatrix step = ub * uj;
    for (int s = 0; s < spec.trotter_steps; ++s) psi = step * psi;
  }
  return DenseState::pure(l, psi);
}

/// Random pure Gaussian state U|ω⟩ with U = exp(-i H(A)), A standard-normal.
/// The covariance side is built in mode space, the state side in Hilbert
/// space, from the same generator.
struct RandomGaussian {
  SkewMatrix generator;
  FockString omega;
  CovarianceMatrix covariance;  // Q M_ω Qᵀ, Q = exp(A)
  ModeRotation rotation;
  DenseOperator unitary;        // exp(-i H(A))
  DenseState state;
};

inline RandomGaussian random_gaussian(int l, Rng& rng, double scale = 1.0, int cap = kDefaultCap) {
  RandomGaussian g;
  g.generator = SkewMatrix::antisymmetrized(scale * random_skew(2 * l, rng).matrix());
  g.omega = random_fock(l, rng);
  g.rotation = skew_exp(g.generator, 1.0);
  g.covariance = conjugate(fock_covariance(g.omega), g.rotation);
  g.unitary = gaussian_unitary(g.generator, 1.0, cap);
  g.state = DenseState::pure(l, g.unitary.m * fock_vector(g.omega));
  return g;
}

}  // namespace fgw::oracle

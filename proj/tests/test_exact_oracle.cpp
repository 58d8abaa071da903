#include <gtest/gtest.h>

#include "fgw/exact_oracle.hpp"
#include "fgw/witness.hpp"

using namespace fgw;
using oracle::Complex;

namespace {

// Random density matrix of rank `rank` on L sites.
oracle::DenseState random_mixed(int l, int rank, Rng& rng) {
  std::normal_distribution<double> g;
  const Eigen::Index dim = Eigen::Index{1} << l;
  ComplexMatrix x(dim, rank);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (int c = 0; c < rank; ++c) x(r, c) = Complex(g(rng), g(rng));
  ComplexMatrix rho = x * x.adjoint();
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return oracle::DenseState::from(l, rho);
}

}  // namespace

TEST(Majoranas, CliffordAlgebra) {
  const int l = 3;
  const Eigen::Index dim = 8;
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  for (int j = 1; j <= 2 * l; ++j) {
    const ComplexMatrix mj = oracle::jw_majorana(j, l).m;
    EXPECT_LE((mj - mj.adjoint()).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE((mj * mj - id).cwiseAbs().maxCoeff(), 0.0);
    for (int k = j + 1; k <= 2 * l; ++k) {
      const ComplexMatrix mk = oracle::jw_majorana(k, l).m;
      EXPECT_LE((mj * mk + mk * mj).cwiseAbs().maxCoeff(), 0.0);
    }
  }
}

TEST(Majoranas, CapIsEnforced) {
  EXPECT_NO_THROW(oracle::jw_majorana(1, 8));
  try {
    oracle::jw_majorana(1, 9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OracleCapExceeded);
  }
  EXPECT_THROW(oracle::jw_majorana(1, 2, 11), Error);
  EXPECT_THROW(oracle::jw_majorana(5, 2), Error);
}

TEST(FockVector, SiteOneIsMostSignificant) {
  const auto v = oracle::fock_vector(FockString({1, 0, 0}));
  EXPECT_EQ(v(4), Complex(1.0, 0.0));
  EXPECT_EQ(v.cwiseAbs().sum(), 1.0);
  // σ^z|1⟩ = -|1⟩ and n = (1 - σ^z)/2
  const auto state = oracle::DenseState::pure(3, v);
  EXPECT_DOUBLE_EQ(oracle::expectation(oracle::pauli_on_site(1, 'z', 3), state), -1.0);
  EXPECT_DOUBLE_EQ(oracle::expectation(oracle::pauli_on_site(2, 'z', 3), state), 1.0);
}

TEST(DenseState, Validation) {
  ComplexMatrix rho = ComplexMatrix::Identity(4, 4);
  EXPECT_THROW(oracle::DenseState::from(2, rho), Error);  // trace 4
  rho /= 4.0;
  EXPECT_NO_THROW(oracle::DenseState::from(2, rho));
  EXPECT_FALSE(oracle::DenseState::from(2, rho).is_pure());
  EXPECT_THROW(oracle::DenseState::from(3, rho), Error);
  ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  EXPECT_THROW(oracle::DenseState::from(1, negative), Error);
}

TEST(WitnessOperator, EqualsOneMinusFlippedNumber) {
  const FockString omega({0, 1});
  const auto u = oracle::DenseOperator{2, ComplexMatrix::Identity(4, 4)};
  const auto w = oracle::witness_operator(u, omega);
  // basis |00⟩,|01⟩,|10⟩,|11⟩ differs from ω = 01 in 1, 0, 2, 1 bits
  EXPECT_DOUBLE_EQ(w.m(0, 0).real(), 0.0);
  EXPECT_DOUBLE_EQ(w.m(1, 1).real(), 1.0);
  EXPECT_DOUBLE_EQ(w.m(2, 2).real(), -1.0);
  EXPECT_DOUBLE_EQ(w.m(3, 3).real(), 0.0);
}

TEST(WitnessOperator, LowerBoundsFidelityOnArbitraryStates) {
  Rng rng(50);
  for (int trial = 0; trial < 20; ++trial) {
    const int l = 1 + trial % 4;
    const auto g = oracle::random_gaussian(l, rng);
    const auto w = oracle::witness_operator(g.unitary, g.omega);
    EXPECT_NEAR(oracle::expectation(w, g.state), 1.0, 1e-10);
    const auto prep = random_mixed(l, 1 + trial % 3, rng);
    EXPECT_LE(oracle::expectation(w, prep), oracle::exact_fidelity(g.state, prep) + 1e-12);
  }
}

TEST(WitnessOperator, CovarianceFormulaMatchesDenseExpectation) {
  Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int l = 1 + trial % 5;
    const auto target = oracle::random_gaussian(l, rng);
    const auto prep = oracle::random_gaussian(l, rng, 0.3);
    const auto w = oracle::witness_operator(target.unitary, target.omega);
    EXPECT_NEAR(witness_value(prep.covariance, target.covariance).f_w, oracle::expectation(w, prep.state), 1e-8);
    // mixed preparations, through their covariance
    const auto mixed = random_mixed(l, 2, rng);
    EXPECT_NEAR(witness_value(oracle::covariance_from_state(mixed), target.covariance).f_w,
                oracle::expectation(w, mixed), 1e-8);
  }
}

TEST(GeneralWitness, BoundsFidelityAndValidates) {
  Rng rng(52);
  const int l = 2;
  const auto target = oracle::random_gaussian(l, rng);
  const ComplexMatrix& rho = target.state.rho();
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  // complement of the target split into its three basis directions
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho);
  std::vector<ComplexMatrix> projectors;
  for (int i = 0; i < 3; ++i) projectors.push_back(es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
  const std::vector<double> weights{0.5, 1.0, 2.0};
  const auto w = oracle::general_witness(target.state, projectors, weights);
  EXPECT_NEAR(oracle::expectation(w, target.state), 1.0, 1e-10);
  for (int trial = 0; trial < 10; ++trial) {
    const auto prep = random_mixed(l, 2, rng);
    EXPECT_LE(oracle::expectation(w, prep), oracle::exact_fidelity(target.state, prep) + 1e-12);
  }

  auto expect_bad = [&](const std::vector<ComplexMatrix>& p, const std::vector<double>& wts) {
    try {
      oracle::general_witness(target.state, p, wts);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidDecomposition);
    }
  };
  expect_bad(projectors, {0.0, 1.0, 2.0});
  expect_bad(projectors, {2.0, 1.0, 3.0});
  expect_bad({projectors[0], projectors[1]}, {1.0, 2.0});        // incomplete
  expect_bad({projectors[0], projectors[1], id - rho}, weights);  // overlaps
}

TEST(CovarianceFromState, VacuumAndPurity) {
  const auto vac = oracle::DenseState::pure(2, oracle::fock_vector(FockString::zeros(2)));
  EXPECT_LE(max_abs(oracle::covariance_from_state(vac).matrix() - fock_covariance(FockString::zeros(2)).matrix()), 0.0);
  const auto mixed = oracle::DenseState::from(2, ComplexMatrix::Identity(4, 4) / 4.0);
  EXPECT_EQ(max_abs(oracle::covariance_from_state(mixed).matrix()), 0.0);
}

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fgw/measurement_sim.hpp"
#include "fgw/spin_models.hpp"

using namespace fgw;

namespace {

CovarianceMatrix random_pure(int l, Rng& rng, double scale = 1.0) {
  const SkewMatrix a = SkewMatrix::antisymmetrized(scale * random_skew(2 * l, rng).matrix());
  return conjugate(fock_covariance(random_fock(l, rng)), skew_exp(a, 1.0));
}

// A target/preparation pair with a nontrivial overlap.
struct Pair {
  CovarianceMatrix target;
  CovarianceMatrix prep;
};

Pair nearby_pair(int l, std::uint64_t seed) {
  Rng rng(seed);
  const CovarianceMatrix target = random_pure(l, rng);
  const ModeRotation kick = skew_exp(random_skew(2 * l, rng), 0.1);
  return {target, conjugate(target, kick)};
}

}  // namespace

TEST(OutcomeProbability, VacuumIsDeterministic) {
  const CovarianceMatrix vac = fock_covariance(FockString::zeros(2));
  EXPECT_DOUBLE_EQ(outcome_probability(vac, 1, 2, 1), 0.0);
  EXPECT_DOUBLE_EQ(outcome_probability(vac, 1, 2, -1), 1.0);
  EXPECT_DOUBLE_EQ(outcome_probability(vac, 1, 3, 1), 0.5);
  EXPECT_THROW(outcome_probability(vac, 2, 1, 1), Error);
  EXPECT_THROW(outcome_probability(vac, 1, 2, 0), Error);
  EXPECT_THROW(outcome_probability(vac, 1, 5, 1), Error);
}

TEST(ImportanceDistribution, WeightsFollowAbsoluteEntries) {
  Rng rng(70);
  const CovarianceMatrix m = random_pure(3, rng);
  const SupportSet omega = support_set(m);
  const ImportanceDistribution d = importance_distribution(m, omega);
  double total = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const auto p = omega.pairs[i];
    EXPECT_NEAR(d.weights[i], std::abs(m(p.j - 1, p.k - 1)) / d.abs_sum, 1e-15);
    EXPECT_EQ(d.signs[i], m(p.j - 1, p.k - 1) > 0 ? 1 : -1);
    total += d.weights[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(d.cumulative.back(), 1.0);
  EXPECT_EQ(d.sample(0.0), 0u);
  EXPECT_EQ(d.sample(1.0), omega.size() - 1);
  EXPECT_THROW(importance_distribution(m, SupportSet{}), Error);
}

TEST(ImportanceSampling, UnbiasedWithinStatisticalError) {
  const Pair p = nearby_pair(4, 71);
  const WitnessReport exact = witness_value(p.prep, p.target);
  const std::uint64_t n = 400000;
  const auto s = sample_importance(p.target, p.prep.skew(), n, 9).result;
  // each draw is bounded by 2|M_t|
  const double se = 2.0 * exact.abs_sum / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(s.x_star, exact.overlap_x, 5.0 * se);
  EXPECT_NEAR(s.f_w_star, 1.0 - 2.0 + 0.25 * s.x_star, 1e-12);
  EXPECT_EQ(s.n, n);
  EXPECT_EQ(s.l, 4);
}

TEST(ImportanceSampling, DeterministicAcrossWorkerCounts) {
  const Pair p = nearby_pair(3, 72);
  SamplingOptions one;
  one.chunk_size = 1000;
  SamplingOptions three = one;
  three.workers = 3;
  const auto a = sample_importance(p.target, p.prep.skew(), 10500, 5, one).result;
  const auto b = sample_importance(p.target, p.prep.skew(), 10500, 5, three).result;
  const auto c = sample_importance(p.target, p.prep.skew(), 10500, 5, one).result;
  EXPECT_EQ(a.signed_count, b.signed_count);
  EXPECT_EQ(a.signed_count, c.signed_count);
  EXPECT_EQ(a.f_w_star, b.f_w_star);
  const auto d = sample_importance(p.target, p.prep.skew(), 10500, 6, one).result;
  EXPECT_NE(a.signed_count, d.signed_count);
}

TEST(ImportanceSampling, HoeffdingRunCount) {
  const Pair p = nearby_pair(2, 73);
  const auto s = sample_witness(p.target, p.prep, 0.1, 0.05, 1).result;
  EXPECT_EQ(s.n, sample_complexity(0.1, 0.05, abs_sum(p.target, support_set(p.target))));
  EXPECT_EQ(s.epsilon, 0.1);
  EXPECT_EQ(s.delta, 0.05);
}

TEST(ImportanceSampling, RecordsRoundTripThroughIngest) {
  const Pair p = nearby_pair(3, 74);
  SamplingOptions opts;
  opts.keep_records = true;
  opts.chunk_size = 777;
  const Sampled s = sample_importance(p.target, p.prep.skew(), 5000, 3, opts);
  ASSERT_EQ(s.records.size(), 5000u);
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    EXPECT_EQ(s.records[i].run, i);
    EXPECT_EQ(s.records[i].setting, -1);
  }
  const EstimatorResult r = ingest_records(s.records, p.target, support_set(p.target), {0.0, 0.0, 3});
  EXPECT_EQ(r.scheme, Scheme::Importance);
  EXPECT_EQ(r.f_w_star, s.result.f_w_star);
  EXPECT_EQ(r.x_star, s.result.x_star);
  EXPECT_EQ(r.n, 5000u);
}

TEST(ImportanceSampling, ArgumentChecks) {
  const Pair p = nearby_pair(2, 75);
  EXPECT_THROW(sample_importance(p.target, p.prep.skew(), 0, 1), Error);
  EXPECT_THROW(sample_importance(p.target, fock_covariance(FockString::zeros(3)).skew(), 10, 1), Error);
}

TEST(CommutingPartition, SettingsAreIndexDisjointAndCoverSupport) {
  for (int l = 1; l <= 8; ++l) {
    Rng rng(76 + l);
    const CovarianceMatrix m = random_pure(l, rng);
    const SupportSet omega = support_set(m, 0.0);
    const auto groups = commuting_partition(omega, l);
    EXPECT_LE(groups.size(), static_cast<std::size_t>(4 * l - 2));
    std::set<MajoranaPair> seen;
    for (const auto& g : groups) {
      std::set<int> indices;
      for (const auto& pair : g) {
        EXPECT_TRUE(indices.insert(pair.j).second);
        EXPECT_TRUE(indices.insert(pair.k).second);
        EXPECT_TRUE(seen.insert(pair).second);
      }
    }
    EXPECT_EQ(seen.size(), omega.size());
  }
}

TEST(Entrywise, TallyEstimatesConverge) {
  const Pair p = nearby_pair(3, 80);
  const std::uint64_t eta = 20000;
  const Sampled s = entrywise_estimate_shots(p.target, p.prep.skew(), eta, 4, true);
  const EstimatorResult& r = s.result;
  const SupportSet omega = support_set(p.target);
  ASSERT_EQ(r.tallies.size(), omega.size());
  ASSERT_TRUE(r.m_star.has_value());
  for (const auto& t : r.tallies) {
    EXPECT_EQ(t.shots, eta);
    EXPECT_NEAR((*r.m_star)(t.pair.j - 1, t.pair.k - 1), p.prep(t.pair.j - 1, t.pair.k - 1), 5.0 / std::sqrt(eta));
  }
  const auto groups = commuting_partition(omega, 3);
  EXPECT_EQ(r.n, groups.size() * eta);
  EXPECT_EQ(s.records.size(), omega.size() * eta);
  EXPECT_NEAR(r.f_w_star, witness_value(p.prep, p.target).f_w, 0.05);
}

TEST(Entrywise, RecordsRoundTripThroughIngest) {
  const Pair p = nearby_pair(2, 81);
  const Sampled s = entrywise_estimate_shots(p.target, p.prep.skew(), 300, 8, true);
  const EstimatorResult r = ingest_records(s.records, p.target, support_set(p.target));
  EXPECT_EQ(r.scheme, Scheme::Entrywise);
  EXPECT_EQ(r.tallies, s.result.tallies);
  EXPECT_EQ(r.n, s.result.n);
  EXPECT_EQ(r.f_w_star, s.result.f_w_star);
}

TEST(Entrywise, BudgetMatchesComplexity) {
  const Pair p = nearby_pair(2, 82);
  const auto s = entrywise_estimate(p.target, p.prep, 2.0, 0.1, 1).result;
  const auto budget = entrywise_sample_complexity(2.0, 0.1, 2, support_set(p.target).size());
  for (const auto& t : s.tallies) EXPECT_EQ(t.shots, budget.per_observable);
}

TEST(Ingest, Errors) {
  const CovarianceMatrix vac = fock_covariance(FockString::zeros(2));
  const SupportSet omega = support_set(vac);
  auto expect_kind = [&](const std::vector<MeasurementRecord>& recs, ErrorKind kind) {
    try {
      ingest_records(recs, vac, omega);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), kind);
    }
  };
  expect_kind({}, ErrorKind::EmptyInput);
  expect_kind({{0, 1, 2, 1, -1}, {1, 3, 4, 1, 0}}, ErrorKind::MixedSchemeError);
  expect_kind({{0, 1, 3, 1, -1}}, ErrorKind::PairNotInSupport);
  expect_kind({{0, 1, 2, 0, -1}}, ErrorKind::InvalidData);
}

TEST(Scheme, ParseAndPrint) {
  EXPECT_EQ(parse_scheme("importance"), Scheme::Importance);
  EXPECT_EQ(parse_scheme(to_string(Scheme::Entrywise)), Scheme::Entrywise);
  EXPECT_THROW(parse_scheme("other"), Error);
}

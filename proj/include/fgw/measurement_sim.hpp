#pragma once

// Single-shot measurements of i m_j m_k on a preparation and the two
// estimators built on them:
//
//  * importance sampling: draw (j,k) with probability |M_t[j,k]| / |M_t|,
//    measure β, record X = 2|M_t| β sgn(M_t[j,k]); E[X] = tr[M_pᵀ M_t].
//  * entrywise: measure every pair of Ω η times, grouping index-disjoint
//    (hence commuting) pairs into simultaneous settings.
//
// Outcomes depend on the preparation only through P(β | j,k) = (1 + β M_p[j,k]) / 2.

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fgw/random.hpp"
#include "fgw/witness.hpp"

namespace fgw {

enum class Scheme { Importance, Entrywise };

inline const char* to_string(Scheme s) { return s == Scheme::Importance ? "importance" : "entrywise"; }

inline Scheme parse_scheme(const std::string& name) {
  if (name == "importance") return Scheme::Importance;
  if (name == "entrywise") return Scheme::Entrywise;
  throw Error(ErrorKind::ParseError, "unknown scheme '" + name + "'");
}

struct MeasurementRecord {
  std::uint64_t run = 0;
  int j = 0;
  int k = 0;
  int beta = 1;
  int setting = -1;  // group id for the entrywise scheme, -1 for importance sampling
  bool operator==(const MeasurementRecord&) const = default;
};

struct PairTally {
  MajoranaPair pair;
  std::uint64_t shots = 0;
  std::int64_t beta_sum = 0;
  bool operator==(const PairTally&) const = default;
};

struct EstimatorResult {
  Scheme scheme = Scheme::Importance;
  double f_w_star = 0.0;
  double x_star = 0.0;
  std::uint64_t n = 0;  // state preparations (runs)
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  int l = 0;
  double abs_sum = 0.0;
  /// Σ β·sgn(M_t[j,k]) over all importance-sampling draws.
  std::int64_t signed_count = 0;
  std::vector<PairTally> tallies;  // entrywise only
  std::optional<SkewMatrix> m_star;  // entrywise only
};

struct SamplingOptions {
  /// Draws per RNG stream. Results depend on it, not on `workers`.
  std::uint64_t chunk_size = 1u << 16;
  unsigned workers = 1;
  bool keep_records = false;
};

struct Sampled {
  EstimatorResult result;
  std::vector<MeasurementRecord> records;
};

// ---------------------------------------------------------------------------

inline void check_pair(int dim, int j, int k) {
  if (j < 1 || k > dim) throw Error(ErrorKind::InvalidDimension, "Majorana index out of range");
  if (j >= k) throw Error(ErrorKind::InvalidIndexOrder, "need j < k");
}

/// Probability that measuring i m_j m_k on the preparation returns β.
inline double outcome_probability(const SkewMatrix& prep, int j, int k, int beta) {
  check_pair(prep.dim(), j, k);
  if (beta != 1 && beta != -1) throw Error(ErrorKind::InvalidParams, "beta must be +1 or -1");
  const double plus = 0.5 + 0.5 * prep(j - 1, k - 1);
  return beta == 1 ? plus : 1.0 - plus;
}

inline double outcome_probability(const CovarianceMatrix& prep, int j, int k, int beta) {
  return outcome_probability(prep.skew(), j, k, beta);
}

struct ImportanceDistribution {
  SupportSet support;
  std::vector<double> weights;
  std::vector<double> cumulative;
  std::vector<int> signs;  // sgn(M_t[j,k])
  double abs_sum = 0.0;

  std::size_t sample(double u) const {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
  }
};

inline ImportanceDistribution importance_distribution(const CovarianceMatrix& target, const SupportSet& omega) {
  if (omega.empty()) throw Error(ErrorKind::EmptySupport, "support set is empty");
  ImportanceDistribution d;
  d.support = omega;
  d.abs_sum = abs_sum(target, omega);
  if (!(d.abs_sum > 0.0)) throw Error(ErrorKind::EmptySupport, "target has no weight on the support");
  d.weights.reserve(omega.size());
  d.cumulative.reserve(omega.size());
  d.signs.reserve(omega.size());
  double running = 0.0;
  for (const auto& p : omega.pairs) {
    const double v = target(p.j - 1, p.k - 1);
    if (v == 0.0) throw Error(ErrorKind::EmptySupport, "zero entry inside the support");
    d.weights.push_back(std::abs(v) / d.abs_sum);
    running += std::abs(v);
    d.cumulative.push_back(running / d.abs_sum);
    d.signs.push_back(v > 0.0 ? 1 : -1);
  }
  d.cumulative.back() = 1.0;
  return d;
}

namespace detail {

struct ChunkOutput {
  std::int64_t signed_count = 0;
  std::vector<MeasurementRecord> records;
};

inline ChunkOutput draw_chunk(const ImportanceDistribution& dist, const SkewMatrix& prep, std::uint64_t seed,
                              std::uint64_t chunk, std::uint64_t first_run, std::uint64_t count, bool keep) {
  Rng rng = make_stream(seed, chunk);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ChunkOutput out;
  if (keep) out.records.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t idx = dist.sample(uniform(rng));
    const MajoranaPair p = dist.support.pairs[idx];
    const double plus = 0.5 + 0.5 * prep(p.j - 1, p.k - 1);
    const int beta = uniform(rng) < plus ? 1 : -1;
    out.signed_count += beta * dist.signs[idx];
    if (keep) out.records.push_back({first_run + i, p.j, p.k, beta, -1});
  }
  return out;
}

inline double x_from_count(double abs_sum_value, std::int64_t signed_count, std::uint64_t n) {
  return 2.0 * abs_sum_value * static_cast<double>(signed_count) / static_cast<double>(n);
}

}  // namespace detail

/// `n` importance-sampling draws. Chunk c uses stream (seed, c); chunks are
/// reduced in order, so the result is independent of the worker count.
inline Sampled sample_importance(const CovarianceMatrix& target, const SkewMatrix& prep, std::uint64_t n,
                                 std::uint64_t seed, const SamplingOptions& options = {}, double tau = kDefaultTau) {
  if (prep.dim() != target.dim()) throw Error(ErrorKind::InvalidDimension, "preparation and target dimensions differ");
  if (n == 0) throw Error(ErrorKind::InvalidParams, "need at least one draw");
  if (options.chunk_size == 0) throw Error(ErrorKind::InvalidParams, "chunk size must be positive");
  const ImportanceDistribution dist = importance_distribution(target, support_set(target, tau));

  const std::uint64_t chunks = (n + options.chunk_size - 1) / options.chunk_size;
  std::vector<detail::ChunkOutput> outputs(chunks);
  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t first = c * options.chunk_size;
    const std::uint64_t count = std::min(options.chunk_size, n - first);
    outputs[c] = detail::draw_chunk(dist, prep, seed, c, first, count, options.keep_records);
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) run_chunk(c);
      }));
    }
    for (auto& j : jobs) j.get();
  }

  Sampled out;
  EstimatorResult& r = out.result;
  r.scheme = Scheme::Importance;
  r.n = n;
  r.seed = seed;
  r.l = target.modes();
  r.abs_sum = dist.abs_sum;
  for (auto& o : outputs) {
    r.signed_count += o.signed_count;
    if (options.keep_records) out.records.insert(out.records.end(), o.records.begin(), o.records.end());
  }
  r.x_star = detail::x_from_count(r.abs_sum, r.signed_count, n);
  r.f_w_star = 1.0 - 0.5 * r.l + 0.25 * r.x_star;
  return out;
}

/// Importance-sampling estimate with N from the Hoeffding bound.
inline Sampled sample_witness(const CovarianceMatrix& target, const SkewMatrix& prep, double epsilon, double delta,
                              std::uint64_t seed, const SamplingOptions& options = {}, double tau = kDefaultTau) {
  if (!target.is_pure(tol::kPurityEvolved)) throw Error(ErrorKind::NotPure, "target covariance is not pure");
  const SupportSet omega = support_set(target, tau);
  const std::uint64_t n = sample_complexity(epsilon, delta, abs_sum(target, omega));
  Sampled s = sample_importance(target, prep, n, seed, options, tau);
  s.result.epsilon = epsilon;
  s.result.delta = delta;
  return s;
}

inline Sampled sample_witness(const CovarianceMatrix& target, const CovarianceMatrix& prep, double epsilon,
                              double delta, std::uint64_t seed, const SamplingOptions& options = {},
                              double tau = kDefaultTau) {
  return sample_witness(target, prep.skew(), epsilon, delta, seed, options, tau);
}

/// Splits Ω into settings of index-disjoint pairs. Pairs on the band
/// k - j = d are split by the parity of ⌊(j-1)/d⌋, so two pairs in a setting
/// never share an index; that gives at most 2(2L-1) settings.
inline std::vector<std::vector<MajoranaPair>> commuting_partition(const SupportSet& omega, int l) {
  std::map<std::pair<int, int>, std::vector<MajoranaPair>> groups;
  for (const auto& p : omega.pairs) {
    if (p.j < 1 || p.k > 2 * l || p.j >= p.k) throw Error(ErrorKind::InvalidDimension, "pair outside 1..2L");
    const int d = p.k - p.j;
    groups[{d, ((p.j - 1) / d) % 2}].push_back(p);
  }
  std::vector<std::vector<MajoranaPair>> out;
  out.reserve(groups.size());
  for (auto& [key, members] : groups) out.push_back(std::move(members));
  return out;
}

namespace detail {

inline SkewMatrix m_star_from_tallies(int dim, const std::vector<PairTally>& tallies) {
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : tallies) {
    if (t.shots == 0) continue;
    const double mean = static_cast<double>(t.beta_sum) / static_cast<double>(t.shots);
    m(t.pair.j - 1, t.pair.k - 1) = mean;
    m(t.pair.k - 1, t.pair.j - 1) = -mean;
  }
  return SkewMatrix::antisymmetrized(m);
}

inline void finish_entrywise(EstimatorResult& r, const CovarianceMatrix& target, double tau) {
  r.m_star = m_star_from_tallies(target.dim(), r.tallies);
  const WitnessReport w = witness_value(*r.m_star, target, tau);
  r.x_star = w.overlap_x;
  r.f_w_star = w.f_w;
  r.abs_sum = w.abs_sum;
  r.l = w.l;
}

}  // namespace detail

/// Entrywise estimate with an explicit per-observable shot count η.
///
/// Each run measures one whole setting; the outcomes of its pairs are drawn
/// independently from their single-pair marginals.
inline Sampled entrywise_estimate_shots(const CovarianceMatrix& target, const SkewMatrix& prep, std::uint64_t eta,
                                        std::uint64_t seed, bool keep_records = false, double tau = kDefaultTau) {
  if (prep.dim() != target.dim()) throw Error(ErrorKind::InvalidDimension, "preparation and target dimensions differ");
  if (!target.is_pure(tol::kPurityEvolved)) throw Error(ErrorKind::NotPure, "target covariance is not pure");
  if (eta == 0) throw Error(ErrorKind::InvalidParams, "need at least one shot per observable");
  const SupportSet omega = support_set(target, tau);
  if (omega.empty()) throw Error(ErrorKind::EmptySupport, "support set is empty");
  const auto groups = commuting_partition(omega, target.modes());

  Sampled out;
  EstimatorResult& r = out.result;
  r.scheme = Scheme::Entrywise;
  r.seed = seed;
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::uint64_t run = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Rng rng = make_stream(seed, g);
    const auto& members = groups[g];
    std::vector<double> plus(members.size());
    std::vector<std::int64_t> sums(members.size(), 0);
    for (std::size_t i = 0; i < members.size(); ++i) plus[i] = 0.5 + 0.5 * prep(members[i].j - 1, members[i].k - 1);
    for (std::uint64_t shot = 0; shot < eta; ++shot, ++run) {
      for (std::size_t i = 0; i < members.size(); ++i) {
        const int beta = uniform(rng) < plus[i] ? 1 : -1;
        sums[i] += beta;
        if (keep_records) out.records.push_back({run, members[i].j, members[i].k, beta, static_cast<int>(g)});
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i) r.tallies.push_back({members[i], eta, sums[i]});
  }
  std::sort(r.tallies.begin(), r.tallies.end(), [](const PairTally& a, const PairTally& b) { return a.pair < b.pair; });
  r.n = run;
  detail::finish_entrywise(r, target, tau);
  return out;
}

/// Entrywise estimate with η = ⌈ε⁻² L³ ln(2|Ω|/δ)⌉.
inline Sampled entrywise_estimate(const CovarianceMatrix& target, const SkewMatrix& prep, double epsilon,
                                  double delta, std::uint64_t seed, bool keep_records = false,
                                  double tau = kDefaultTau) {
  const SupportSet omega = support_set(target, tau);
  if (omega.empty()) throw Error(ErrorKind::EmptySupport, "support set is empty");
  const EntrywiseBudget budget = entrywise_sample_complexity(epsilon, delta, target.modes(), omega.size());
  Sampled s = entrywise_estimate_shots(target, prep, budget.per_observable, seed, keep_records, tau);
  s.result.epsilon = epsilon;
  s.result.delta = delta;
  return s;
}

inline Sampled entrywise_estimate(const CovarianceMatrix& target, const CovarianceMatrix& prep, double epsilon,
                                  double delta, std::uint64_t seed, bool keep_records = false,
                                  double tau = kDefaultTau) {
  return entrywise_estimate(target, prep.skew(), epsilon, delta, seed, keep_records, tau);
}

struct IngestEcho {
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

/// Rebuilds an estimate from recorded outcomes. The scheme is inferred from
/// the setting column: all -1 is importance sampling, all >= 0 is entrywise.
inline EstimatorResult ingest_records(const std::vector<MeasurementRecord>& records, const CovarianceMatrix& target,
                                      const SupportSet& omega, const IngestEcho& echo = {}) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no measurement records");
  if (!target.is_pure(tol::kPurityEvolved)) throw Error(ErrorKind::NotPure, "target covariance is not pure");
  const bool importance = records.front().setting < 0;
  for (const auto& rec : records) {
    if ((rec.setting < 0) != importance) throw Error(ErrorKind::MixedSchemeError, "records mix both schemes");
    if (rec.beta != 1 && rec.beta != -1) throw Error(ErrorKind::InvalidData, "beta must be +1 or -1");
    if (!omega.contains({rec.j, rec.k})) {
      throw Error(ErrorKind::PairNotInSupport,
                  "pair (" + std::to_string(rec.j) + ", " + std::to_string(rec.k) + ") is not in the support");
    }
  }

  EstimatorResult r;
  r.epsilon = echo.epsilon;
  r.delta = echo.delta;
  r.seed = echo.seed;
  r.l = target.modes();
  if (importance) {
    r.scheme = Scheme::Importance;
    r.abs_sum = abs_sum(target, omega);
    for (const auto& rec : records) r.signed_count += rec.beta * (target(rec.j - 1, rec.k - 1) > 0.0 ? 1 : -1);
    r.n = records.size();
    r.x_star = detail::x_from_count(r.abs_sum, r.signed_count, r.n);
    r.f_w_star = 1.0 - 0.5 * r.l + 0.25 * r.x_star;
    return r;
  }

  r.scheme = Scheme::Entrywise;
  std::map<MajoranaPair, PairTally> tallies;
  std::map<std::pair<int, std::uint64_t>, bool> runs;
  for (const auto& rec : records) {
    auto& t = tallies[{rec.j, rec.k}];
    t.pair = {rec.j, rec.k};
    ++t.shots;
    t.beta_sum += rec.beta;
    runs[{rec.setting, rec.run}] = true;
  }
  for (auto& [pair, t] : tallies) r.tallies.push_back(t);
  r.n = runs.size();
  detail::finish_entrywise(r, target, omega.tau);
  return r;
}

}  // namespace fgw

#pragma once

// Sudden-quench certification experiment: |↑…↑⟩ evolved under the critical
// transverse-field Ising chain (J = B = 1) up to t = L/8, certified against a
// Trotterized preparation: heatmap, z-strings, abs-sum scaling and Trotter grid.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "fgw/io.hpp"
#include "fgw/measurement_sim.hpp"
#include "fgw/spin_models.hpp"
#include "fgw/witness.hpp"

namespace fgw {

struct PowerFit {
  double prefactor = 0.0;
  double exponent = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  std::size_t points = 0;
};

/// Least squares of log v = log c + p log L.
inline PowerFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 4) throw Error(ErrorKind::InvalidData, "power fit needs at least 4 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorKind::InvalidData, "power fit needs positive data");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y) - my);
  }
  if (sxx == 0.0) throw Error(ErrorKind::InvalidData, "power fit needs at least two distinct abscissae");
  PowerFit fit;
  fit.exponent = sxy / sxx;
  const double log_c = my - fit.exponent * mx;
  fit.prefactor = std::exp(log_c);
  double ss = 0;
  for (const auto& [x, y] : points) {
    const double r = std::log(y) - log_c - fit.exponent * std::log(x);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points = points.size();
  return fit;
}

struct Fig2Config {
  std::vector<int> sizes{8, 16, 32, 64, 128};
  std::vector<int> trotter_steps{2, 4, 8, 16, 32, 64, 128, 256};
  double j = 1.0;
  double b = 1.0;
  double time_per_site = 1.0 / 8.0;
  double epsilon = 0.05;
  double delta = 0.1;
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;  // Monte Carlo draws per (L, T) point; 0 disables
  double tau = kDefaultTau;
  double fidelity_level = 0.8;
  unsigned workers = 1;

  void validate() const {
    if (sizes.empty()) throw Error(ErrorKind::InvalidParams, "L list is empty");
    for (int l : sizes)
      if (l < 1) throw Error(ErrorKind::InvalidParams, "L must be >= 1");
    for (int t : trotter_steps)
      if (t < 1) throw Error(ErrorKind::InvalidParams, "Trotter step counts must be >= 1");
  }
};

struct ScalingRow {
  int l = 0;
  double t = 0.0;
  double abs_sum = 0.0;       // upper triangle, Σ_Ω |M_t[j,k]|
  double full_abs_sum = 0.0;  // all 4L² entries
  std::size_t omega_size = 0;
  std::uint64_t n_bound = 0;  // importance-sampling runs at (ε, δ)
};

struct TrotterRow {
  int l = 0;
  int steps = 0;
  double f_w = 0.0;
  double f_w_star = 0.0;
  std::uint64_t samples = 0;
};

struct Fig2Result {
  int heatmap_l = 0;
  Matrix heatmap;                 // |M_t| for the largest L
  std::vector<double> zstring;    // |⟨σ^z_1 ⋯ σ^z_n⟩|, n = 1..L
  std::vector<ScalingRow> scaling;
  PowerFit fit_upper;
  PowerFit fit_full;
  std::vector<TrotterRow> trotter;
  std::map<int, int> steps_to_level;  // smallest T with F_W ≥ level, -1 if none
};

inline QuenchSpec critical_quench(int l, const Fig2Config& cfg, int steps = 0) {
  QuenchSpec s;
  s.params = ChainParams::uniform(l, cfg.j, cfg.b);
  s.t = cfg.time_per_site * l;
  s.trotter_steps = steps;
  s.omega = FockString::zeros(l);
  return s;
}

inline Fig2Result run_fig2(const Fig2Config& cfg) {
  cfg.validate();
  Fig2Result out;

  std::map<int, CovarianceMatrix> targets;
  for (int l : cfg.sizes) targets.emplace(l, quench_target(critical_quench(l, cfg)));

  const int largest = *std::max_element(cfg.sizes.begin(), cfg.sizes.end());
  const CovarianceMatrix& big = targets.at(largest);
  out.heatmap_l = largest;
  out.heatmap = big.matrix().cwiseAbs();
  for (int n = 1; n <= largest; ++n) out.zstring.push_back(zstring_expectation(big, n));

  std::vector<std::pair<double, double>> upper, full;
  for (int l : cfg.sizes) {
    const CovarianceMatrix& m = targets.at(l);
    const SupportSet omega = support_set(m, cfg.tau);
    ScalingRow row;
    row.l = l;
    row.t = cfg.time_per_site * l;
    row.abs_sum = abs_sum(m, omega);
    row.full_abs_sum = m.matrix().cwiseAbs().sum();
    row.omega_size = omega.size();
    row.n_bound = sample_complexity(cfg.epsilon, cfg.delta, row.abs_sum);
    out.scaling.push_back(row);
    upper.emplace_back(l, row.abs_sum);
    full.emplace_back(l, row.full_abs_sum);
  }
  if (cfg.sizes.size() >= 4) {
    out.fit_upper = fit_power_law(upper);
    out.fit_full = fit_power_law(full);
  }

  // (L, T) grid points are independent and seeded by position
  std::vector<std::pair<int, int>> grid;
  for (int l : cfg.sizes)
    for (int t : cfg.trotter_steps) grid.emplace_back(l, t);
  std::vector<TrotterRow> rows(grid.size());
  auto evaluate = [&](std::size_t i) {
    const auto [l, steps] = grid[i];
    const CovarianceMatrix& target = targets.at(l);
    const CovarianceMatrix prep = quench_target(critical_quench(l, cfg, steps));
    TrotterRow row;
    row.l = l;
    row.steps = steps;
    row.f_w = witness_value(prep, target, cfg.tau).f_w;
    if (cfg.samples > 0) {
      const std::uint64_t seed = hash_combine(hash_combine(cfg.seed, static_cast<std::uint64_t>(l)), static_cast<std::uint64_t>(steps));
      row.f_w_star = sample_importance(target, prep.skew(), cfg.samples, seed, {}, cfg.tau).result.f_w_star;
      row.samples = cfg.samples;
    }
    rows[i] = row;
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(grid.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) evaluate(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < grid.size(); i += workers) evaluate(i);
      }));
    for (auto& j : jobs) j.get();
  }
  out.trotter = std::move(rows);

  for (int l : cfg.sizes) {
    int best = -1;
    for (const auto& r : out.trotter)
      if (r.l == l && r.f_w >= cfg.fidelity_level && (best < 0 || r.steps < best)) best = r.steps;
    out.steps_to_level[l] = best;
  }
  return out;
}

/// Writes heatmap.csv, zstring.csv, scaling.csv, fit.csv, trotter.csv and
/// summary.json into `dir`.
inline void write_fig2(const Fig2Result& r, const Fig2Config& cfg, const std::filesystem::path& dir) {
  using io::format_double;
  std::filesystem::create_directories(dir);
  {
    std::ostringstream os;
    os << "j,k,abs_m\n";
    for (Eigen::Index a = 0; a < r.heatmap.rows(); ++a)
      for (Eigen::Index b = 0; b < r.heatmap.cols(); ++b)
        os << a + 1 << ',' << b + 1 << ',' << format_double(r.heatmap(a, b)) << '\n';
    io::write_text_file((dir / "heatmap.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    os << "n,zstring\n";
    for (std::size_t n = 0; n < r.zstring.size(); ++n) os << n + 1 << ',' << format_double(r.zstring[n]) << '\n';
    io::write_text_file((dir / "zstring.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    os << "L,t,abs_sum,full_abs_sum,omega_size,n_bound\n";
    for (const auto& s : r.scaling)
      os << s.l << ',' << format_double(s.t) << ',' << format_double(s.abs_sum) << ',' << format_double(s.full_abs_sum)
         << ',' << s.omega_size << ',' << s.n_bound << '\n';
    io::write_text_file((dir / "scaling.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    os << "quantity,prefactor,exponent,residual,points\n";
    for (const auto& [name, f] : {std::pair{"abs_sum", r.fit_upper}, std::pair{"full_abs_sum", r.fit_full}})
      os << name << ',' << format_double(f.prefactor) << ',' << format_double(f.exponent) << ','
         << format_double(f.residual) << ',' << f.points << '\n';
    io::write_text_file((dir / "fit.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    os << "L,T,f_w,f_w_star,samples\n";
    for (const auto& t : r.trotter)
      os << t.l << ',' << t.steps << ',' << format_double(t.f_w) << ',' << format_double(t.f_w_star) << ','
         << t.samples << '\n';
    io::write_text_file((dir / "trotter.csv").string(), os.str());
  }
  io::json summary;
  summary["heatmap_L"] = r.heatmap_l;
  summary["fit_abs_sum"] = {{"prefactor", r.fit_upper.prefactor}, {"exponent", r.fit_upper.exponent}, {"residual", r.fit_upper.residual}};
  summary["fit_full_abs_sum"] = {{"prefactor", r.fit_full.prefactor}, {"exponent", r.fit_full.exponent}, {"residual", r.fit_full.residual}};
  summary["fidelity_level"] = cfg.fidelity_level;
  for (const auto& [l, steps] : r.steps_to_level) summary["steps_to_level"][std::to_string(l)] = steps;
  summary["seed"] = cfg.seed;
  io::write_text_file((dir / "summary.json").string(), summary.dump(2) + "\n");
}

}  // namespace fgw

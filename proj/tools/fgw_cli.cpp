// fgw: command-line driver for fermionic Gaussian fidelity witnesses.
//
//   fgw target  --L 8 --J 1 --B 1 --t 1 [--T 4] [--mode quench|ground] --output target.json
//   fgw witness --target target.json --prep prep.json
//   fgw sample  --target target.json --prep prep.json --epsilon 0.05 --delta 0.1 --records rec.csv
//   fgw fig2    --L 8,16,32,64,128 --T 2,4,8,16,32,64,128,256 --outdir fig2
//   fgw robust  --records rec.csv --target target.json --FT 0.9 --gap 0.06 --epsilon 0.02 --delta 0.1
//   fgw fit     --input points.csv
//
// Exit codes: 0 success (robust: Accept), 1 robust Reject, 2 error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fgw/fgw.hpp"

namespace {

using fgw::io::json;

struct Globals {
  std::uint64_t seed = 1;
  std::string output = "-";
  std::string format = "json";
  double tau = fgw::kDefaultTau;
  std::string config;
};

void emit(const Globals& g, const std::string& text) {
  if (g.output == "-" || g.output.empty()) {
    std::cout << text;
  } else {
    fgw::io::write_text_file(g.output, text);
  }
}

// One header line plus one row, fixed column order.
std::string flat_csv(const json& j, const std::vector<std::string>& columns) {
  std::ostringstream head, row;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    const json& v = j.at(columns[i]);
    head << (i ? "," : "") << columns[i];
    row << (i ? "," : "");
    if (v.is_number_float()) {
      row << fgw::io::format_double(v.get<double>());
    } else if (v.is_string()) {
      row << v.get<std::string>();
    } else {
      row << v.dump();
    }
  }
  return head.str() + "\n" + row.str() + "\n";
}

std::string render(const Globals& g, const json& j, const std::vector<std::string>& columns) {
  if (g.format == "csv") return flat_csv(j, columns);
  return j.dump(2) + "\n";
}

fgw::FockString parse_bits(const std::string& text, int l) {
  if (text.empty()) return fgw::FockString::zeros(l);
  std::vector<std::uint8_t> bits;
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != ',' && c != ' ') throw fgw::Error(fgw::ErrorKind::ParseError, "omega must be a bit string");
  }
  if (static_cast<int>(bits.size()) != l) throw fgw::Error(fgw::ErrorKind::InvalidDimension, "omega length differs from L");
  return fgw::FockString(std::move(bits));
}

std::vector<std::pair<double, double>> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw fgw::Error(fgw::ErrorKind::ParseError, "cannot open " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    double x = 0, y = 0;
    char comma = 0;
    if (row >> x >> comma >> y && comma == ',') pts.emplace_back(x, y);
  }
  return pts;
}

// Keys of a --config JSON object become "--key value" arguments unless the
// same flag was given on the command line.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") path = args[i + 1];
  if (path.empty()) return args;
  const json cfg = fgw::io::read_json_file(path);
  if (!cfg.is_object()) throw fgw::Error(fgw::ErrorKind::ParseError, "config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (std::find(args.begin(), args.end(), flag) != args.end()) continue;
    std::string text;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
    } else if (value.is_string()) {
      text = value.get<std::string>();
    } else {
      text = value.dump();
    }
    args.push_back(flag);
    args.push_back(text);
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fidelity witnesses for fermionic Gaussian states"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--output", g.output, "Output file ('-' for stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--tau", g.tau, "Zero threshold for the target support")->capture_default_str();
  app.add_option("--config", g.config, "JSON file with option overrides");
  app.fallthrough();

  // target
  auto* target = app.add_subcommand("target", "Build a target covariance matrix");
  int l = 0, steps = 0;
  double jx = 1.0, jy = 0.0, field = 1.0, time = 0.0;
  std::string omega_text, mode = "quench", spec_path;
  target->add_option("--L", l, "Number of sites");
  target->add_option("--J", jx, "xx coupling")->capture_default_str();
  target->add_option("--Jy", jy, "yy coupling")->capture_default_str();
  target->add_option("--B", field, "Transverse field")->capture_default_str();
  target->add_option("--t", time, "Evolution time");
  target->add_option("--T", steps, "Trotter steps (0 = continuous)");
  target->add_option("--omega", omega_text, "Initial Fock string, e.g. 0101");
  target->add_option("--mode", mode, "quench or ground")->check(CLI::IsMember({"quench", "ground"}));
  target->add_option("--spec", spec_path, "Quench spec JSON file");

  // witness
  auto* witness = app.add_subcommand("witness", "Evaluate the witness from two covariance files");
  std::string target_path, prep_path;
  witness->add_option("--target", target_path)->required();
  witness->add_option("--prep", prep_path)->required();

  // sample
  auto* sample = app.add_subcommand("sample", "Simulate a finite-sample witness estimate");
  double epsilon = 0.05, delta = 0.1;
  std::string scheme = "importance", records_path;
  unsigned workers = 1;
  sample->add_option("--target", target_path)->required();
  sample->add_option("--prep", prep_path)->required();
  sample->add_option("--epsilon", epsilon)->capture_default_str();
  sample->add_option("--delta", delta)->capture_default_str();
  sample->add_option("--scheme", scheme)->check(CLI::IsMember({"importance", "entrywise"}))->capture_default_str();
  sample->add_option("--records", records_path, "Write measurement records (CSV)");
  sample->add_option("--workers", workers)->capture_default_str();

  // fig2
  auto* fig2 = app.add_subcommand("fig2", "Critical-quench sweep data");
  fgw::Fig2Config fig;
  std::string outdir = "fig2";
  fig2->add_option("--L", fig.sizes, "Sizes")->delimiter(',');
  fig2->add_option("--T", fig.trotter_steps, "Trotter step counts")->delimiter(',');
  fig2->add_option("--J", fig.j)->capture_default_str();
  fig2->add_option("--B", fig.b)->capture_default_str();
  fig2->add_option("--time-per-site", fig.time_per_site, "t = factor * L")->capture_default_str();
  fig2->add_option("--epsilon", fig.epsilon)->capture_default_str();
  fig2->add_option("--delta", fig.delta)->capture_default_str();
  fig2->add_option("--samples", fig.samples, "Monte Carlo draws per (L, T)")->capture_default_str();
  fig2->add_option("--workers", fig.workers)->capture_default_str();
  fig2->add_option("--outdir", outdir)->capture_default_str();

  // robust
  auto* robust = app.add_subcommand("robust", "Robust accept/reject decision on recorded data");
  fgw::CertificationParams cert;
  robust->add_option("--records", records_path)->required();
  robust->add_option("--target", target_path)->required();
  robust->add_option("--FT", cert.threshold)->required();
  robust->add_option("--gap", cert.gap)->required();
  robust->add_option("--epsilon", cert.max_error)->required();
  robust->add_option("--delta", cert.failure_prob)->required();

  // fit
  auto* fit = app.add_subcommand("fit", "Power-law fit of (L, value) pairs");
  std::string input;
  std::vector<std::string> point_text;
  fit->add_option("--input", input, "CSV with L,value rows");
  fit->add_option("--points", point_text, "L:value pairs")->delimiter(',');

  std::vector<std::string> args;
  try {
    std::vector<std::string> raw(argv + 1, argv + argc);
    args = apply_config(raw);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*target) {
      fgw::QuenchSpec spec;
      if (!spec_path.empty()) {
        spec = fgw::io::quench_spec_from_json(fgw::io::read_json_file(spec_path));
      } else {
        if (l < 1) throw fgw::Error(fgw::ErrorKind::InvalidParams, "--L is required");
        spec.params = fgw::ChainParams::uniform(l, jx, field, jy);
        spec.t = time;
        spec.trotter_steps = steps;
        spec.omega = parse_bits(omega_text, l);
      }
      const fgw::CovarianceMatrix m =
          mode == "ground" ? fgw::chain_ground_state(spec.params) : fgw::quench_target(spec);
      emit(g, fgw::io::to_json(m).dump() + "\n");
      return 0;
    }
    if (*witness) {
      const auto t = fgw::io::read_covariance(target_path);
      const auto p = fgw::io::read_covariance(prep_path);
      const json report = fgw::io::to_json(fgw::witness_value(p, t, g.tau));
      emit(g, render(g, report, {"f_w", "overlap_x", "abs_sum", "l", "omega_size", "tau"}));
      return 0;
    }
    if (*sample) {
      const auto t = fgw::io::read_covariance(target_path);
      const auto p = fgw::io::read_covariance(prep_path);
      const bool keep = !records_path.empty();
      fgw::Sampled s;
      if (fgw::parse_scheme(scheme) == fgw::Scheme::Importance) {
        fgw::SamplingOptions opt;
        opt.workers = workers;
        opt.keep_records = keep;
        s = fgw::sample_witness(t, p, epsilon, delta, g.seed, opt, g.tau);
      } else {
        s = fgw::entrywise_estimate(t, p, epsilon, delta, g.seed, keep, g.tau);
      }
      if (keep) {
        std::ofstream out(records_path, std::ios::binary);
        if (!out) throw fgw::Error(fgw::ErrorKind::ParseError, "cannot write " + records_path);
        fgw::io::write_records(out, s.result.scheme, s.records);
      }
      emit(g, render(g, fgw::io::to_json(s.result), {"f_w_star", "x_star", "n", "epsilon", "delta", "scheme", "seed"}));
      return 0;
    }
    if (*fig2) {
      fig.seed = g.seed;
      fig.tau = g.tau;
      const fgw::Fig2Result r = fgw::run_fig2(fig);
      fgw::write_fig2(r, fig, outdir);
      emit(g, fgw::io::read_json_file((std::filesystem::path(outdir) / "summary.json").string()).dump(2) + "\n");
      return 0;
    }
    if (*robust) {
      cert.validate();
      const auto t = fgw::io::read_covariance(target_path);
      std::ifstream in(records_path);
      if (!in) throw fgw::Error(fgw::ErrorKind::ParseError, "cannot open " + records_path);
      const fgw::io::RecordFile file = fgw::io::read_records(in);
      const fgw::EstimatorResult r =
          fgw::ingest_records(file.records, t, fgw::support_set(t, g.tau), {cert.max_error, cert.failure_prob, g.seed});
      const fgw::Decision d = fgw::robust_test(r.f_w_star, cert);
      json report = fgw::io::to_json(r);
      report["decision"] = fgw::to_string(d);
      report["acceptance_level"] = cert.threshold + cert.max_error;
      report["mismatch_threshold"] = fgw::mismatch_threshold(cert);
      std::cout << fgw::to_string(d) << "\n";
      emit(g, render(g, report, {"decision", "f_w_star", "acceptance_level", "mismatch_threshold", "n", "scheme"}));
      return d == fgw::Decision::Accept ? 0 : 1;
    }
    if (*fit) {
      std::vector<std::pair<double, double>> pts;
      if (!input.empty()) pts = read_points(input);
      for (const auto& p : point_text) {
        const auto colon = p.find(':');
        if (colon == std::string::npos) throw fgw::Error(fgw::ErrorKind::ParseError, "points must look like L:value");
        pts.emplace_back(std::stod(p.substr(0, colon)), std::stod(p.substr(colon + 1)));
      }
      const fgw::PowerFit f = fgw::fit_power_law(pts);
      const json j{{"prefactor", f.prefactor}, {"exponent", f.exponent}, {"residual", f.residual}, {"points", f.points}};
      emit(g, render(g, j, {"prefactor", "exponent", "residual", "points"}));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

#pragma once

// File formats:
//   matrix   {"dim": 2L, "kind": "covariance"|"coupling"|"rotation", "entries": [row-major 4L² doubles]}
//   quench   {"L":, "Jx":, "Jy":, "B":, "t":, "T":, "omega": [bits]}   (scalars broadcast)
//   records  CSV: "scheme,<importance|entrywise>", "run,j,k,beta,setting", rows

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fgw/measurement_sim.hpp"
#include "fgw/spin_models.hpp"
#include "fgw/witness.hpp"

namespace fgw::io {

using json = nlohmann::json;

enum class MatrixKind { Covariance, Coupling, Rotation };

inline const char* to_string(MatrixKind k) {
  switch (k) {
    case MatrixKind::Covariance: return "covariance";
    case MatrixKind::Coupling: return "coupling";
    case MatrixKind::Rotation: return "rotation";
  }
  return "";
}

inline MatrixKind parse_kind(const std::string& s) {
  if (s == "covariance") return MatrixKind::Covariance;
  if (s == "coupling") return MatrixKind::Coupling;
  if (s == "rotation") return MatrixKind::Rotation;
  throw Error(ErrorKind::ParseError, "unknown matrix kind '" + s + "'");
}

/// Shortest text that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

inline json matrix_json(const Matrix& m, MatrixKind kind) {
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back(m(r, c));
  return json{{"dim", m.rows()}, {"kind", to_string(kind)}, {"entries", entries}};
}

inline json to_json(const CovarianceMatrix& m) { return matrix_json(m.matrix(), MatrixKind::Covariance); }
inline json to_json(const ModeRotation& q) { return matrix_json(q.matrix(), MatrixKind::Rotation); }
inline json coupling_json(const SkewMatrix& a) { return matrix_json(a.matrix(), MatrixKind::Coupling); }

struct MatrixDocument {
  MatrixKind kind = MatrixKind::Covariance;
  int dim = 0;
  std::vector<double> entries;
};

inline MatrixDocument parse_matrix(const json& j) {
  try {
    MatrixDocument d;
    d.dim = j.at("dim").get<int>();
    d.kind = parse_kind(j.at("kind").get<std::string>());
    d.entries = j.at("entries").get<std::vector<double>>();
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("matrix file: ") + e.what());
  }
}

inline SkewMatrix skew_from(const MatrixDocument& d) { return make_skew(d.dim, d.entries); }

inline CovarianceMatrix covariance_from_json(const json& j) {
  const MatrixDocument d = parse_matrix(j);
  if (d.kind != MatrixKind::Covariance) throw Error(ErrorKind::ParseError, "expected a covariance matrix");
  return CovarianceMatrix::from(skew_from(d));
}

inline SkewMatrix coupling_from_json(const json& j) {
  const MatrixDocument d = parse_matrix(j);
  if (d.kind != MatrixKind::Coupling) throw Error(ErrorKind::ParseError, "expected a coupling matrix");
  return skew_from(d);
}

inline ModeRotation rotation_from_json(const json& j) {
  const MatrixDocument d = parse_matrix(j);
  if (d.kind != MatrixKind::Rotation) throw Error(ErrorKind::ParseError, "expected a rotation matrix");
  if (d.dim <= 0 || d.dim % 2 != 0) throw Error(ErrorKind::InvalidDimension, "rotation dimension must be even");
  if (d.entries.size() != static_cast<std::size_t>(d.dim) * d.dim) {
    throw Error(ErrorKind::InvalidDimension, "rotation entry count mismatch");
  }
  Matrix q(d.dim, d.dim);
  for (int r = 0; r < d.dim; ++r)
    for (int c = 0; c < d.dim; ++c) q(r, c) = d.entries[static_cast<std::size_t>(r) * d.dim + c];
  return ModeRotation::from(q);
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::ParseError, "cannot write " + path);
  out << text;
}

inline CovarianceMatrix read_covariance(const std::string& path) { return covariance_from_json(read_json_file(path)); }

// --- QuenchSpec ------------------------------------------------------------

namespace detail {
inline std::vector<double> broadcast(const json& j, const char* key, std::size_t n, double fallback) {
  if (!j.contains(key)) return std::vector<double>(n, fallback);
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (out.size() != n) throw Error(ErrorKind::InvalidDimension, std::string(key) + " has the wrong length");
  return out;
}
}  // namespace detail

inline QuenchSpec quench_spec_from_json(const json& j) {
  try {
    QuenchSpec s;
    const int l = j.at("L").get<int>();
    if (l < 1) throw Error(ErrorKind::InvalidDimension, "L must be >= 1");
    const auto bonds = static_cast<std::size_t>(l - 1);
    s.params.sites = l;
    s.params.jx = detail::broadcast(j, "Jx", bonds, 0.0);
    s.params.jy = detail::broadcast(j, "Jy", bonds, 0.0);
    s.params.b = detail::broadcast(j, "B", static_cast<std::size_t>(l), 0.0);
    s.t = j.value("t", 0.0);
    s.trotter_steps = j.value("T", 0);
    if (j.contains("omega")) {
      s.omega = FockString(j.at("omega").get<std::vector<std::uint8_t>>());
    } else {
      s.omega = FockString::zeros(l);
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("quench spec: ") + e.what());
  }
}

inline json to_json(const QuenchSpec& s) {
  return json{{"L", s.params.sites}, {"Jx", s.params.jx}, {"Jy", s.params.jy}, {"B", s.params.b},
              {"t", s.t},           {"T", s.trotter_steps}, {"omega", s.omega.bits()}};
}

// --- reports -----------------------------------------------------------------

inline json to_json(const WitnessReport& r) {
  return json{{"f_w", r.f_w},   {"overlap_x", r.overlap_x},   {"abs_sum", r.abs_sum},
              {"l", r.l},       {"omega_size", r.omega_size}, {"tau", r.tau}};
}

inline json to_json(const EstimatorResult& r) {
  return json{{"f_w_star", r.f_w_star}, {"x_star", r.x_star},        {"n", r.n},
              {"epsilon", r.epsilon},   {"delta", r.delta},          {"scheme", to_string(r.scheme)},
              {"seed", r.seed}};
}

// --- measurement records -------------------------------------------------------

struct RecordFile {
  Scheme scheme = Scheme::Importance;
  std::vector<MeasurementRecord> records;
};

inline void write_records(std::ostream& out, Scheme scheme, const std::vector<MeasurementRecord>& records) {
  out << "scheme," << to_string(scheme) << '\n' << "run,j,k,beta,setting\n";
  for (const auto& r : records) out << r.run << ',' << r.j << ',' << r.k << ',' << r.beta << ',' << r.setting << '\n';
}

inline RecordFile read_records(std::istream& in) {
  RecordFile file;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyInput, "record file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("scheme,", 0) != 0) throw Error(ErrorKind::ParseError, "record file must start with 'scheme,<name>'");
  file.scheme = parse_scheme(line.substr(7));
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.rfind("run,", 0) == 0) continue;
    std::istringstream row(line);
    MeasurementRecord r;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(row >> r.run >> c1 >> r.j >> c2 >> r.k >> c3 >> r.beta >> c4 >> r.setting) || c1 != ',' || c2 != ',' ||
        c3 != ',' || c4 != ',') {
      throw Error(ErrorKind::ParseError, "malformed record on line " + std::to_string(line_no));
    }
    if ((r.setting < 0) != (file.scheme == Scheme::Importance)) {
      throw Error(ErrorKind::MixedSchemeError, "record on line " + std::to_string(line_no) + " contradicts the scheme header");
    }
    file.records.push_back(r);
  }
  return file;
}

}  // namespace fgw::io

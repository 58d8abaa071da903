#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "fgw/io.hpp"

using namespace fgw;

namespace {

CovarianceMatrix sample_target() {
  QuenchSpec s;
  s.params = ChainParams::uniform(3, 1.0, 1.0);
  s.t = 0.4;
  s.omega = FockString({0, 1, 0});
  return quench_target(s);
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123456789}) EXPECT_EQ(std::stod(io::format_double(v)), v);
}

TEST(MatrixJson, CovarianceRoundTrip) {
  const CovarianceMatrix m = sample_target();
  const io::json j = io::to_json(m);
  EXPECT_EQ(j.at("dim").get<int>(), 6);
  EXPECT_EQ(j.at("kind").get<std::string>(), "covariance");
  EXPECT_EQ(j.at("entries").size(), 36u);
  const CovarianceMatrix back = io::covariance_from_json(io::json::parse(j.dump()));
  EXPECT_EQ(back.matrix(), m.matrix());
}

TEST(MatrixJson, RotationAndCouplingRoundTrip) {
  const SkewMatrix a = xy_coupling_matrix(ChainParams::uniform(2, 1.0, 0.5, 0.2));
  EXPECT_EQ(io::coupling_from_json(io::coupling_json(a)).matrix(), a.matrix());
  const ModeRotation q = skew_exp(a, 0.3);
  EXPECT_EQ(io::rotation_from_json(io::json::parse(io::to_json(q).dump())).matrix(), q.matrix());
}

TEST(MatrixJson, Errors) {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ContractViolation;
  };
  const io::json wrong_kind = io::coupling_json(make_skew(2, Matrix::Zero(2, 2)));
  EXPECT_EQ(kind_of([&] { io::covariance_from_json(wrong_kind); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([&] { io::covariance_from_json(io::json{{"dim", 2}}); }), ErrorKind::ParseError);
  const io::json short_entries{{"dim", 2}, {"kind", "covariance"}, {"entries", {0.0, 1.0}}};
  EXPECT_EQ(kind_of([&] { io::covariance_from_json(short_entries); }), ErrorKind::InvalidDimension);
  const io::json symmetric{{"dim", 2}, {"kind", "covariance"}, {"entries", {0.0, 1.0, 1.0, 0.0}}};
  EXPECT_EQ(kind_of([&] { io::covariance_from_json(symmetric); }), ErrorKind::NotAntisymmetric);
  EXPECT_EQ(kind_of([&] { io::read_json_file("/nonexistent/file.json"); }), ErrorKind::ParseError);
}

TEST(QuenchJson, BroadcastsScalarsAndDefaultsOmega) {
  const io::json j = io::json::parse(R"({"L": 3, "Jx": 1.0, "B": [0.5, 1.0, 1.5], "t": 0.75})");
  const QuenchSpec s = io::quench_spec_from_json(j);
  EXPECT_EQ(s.params.sites, 3);
  EXPECT_EQ(s.params.jx, (std::vector<double>{1.0, 1.0}));
  EXPECT_EQ(s.params.jy, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(s.params.b, (std::vector<double>{0.5, 1.0, 1.5}));
  EXPECT_EQ(s.t, 0.75);
  EXPECT_EQ(s.trotter_steps, 0);
  EXPECT_EQ(s.omega, FockString::zeros(3));
  const QuenchSpec back = io::quench_spec_from_json(io::to_json(s));
  EXPECT_EQ(back.params.b, s.params.b);
  EXPECT_EQ(back.omega, s.omega);
}

TEST(QuenchJson, Errors) {
  EXPECT_THROW(io::quench_spec_from_json(io::json::parse(R"({"L": 3, "B": [1, 2]})")), Error);
  EXPECT_THROW(io::quench_spec_from_json(io::json::parse(R"({"L": 0})")), Error);
  EXPECT_THROW(io::quench_spec_from_json(io::json::parse(R"({"L": 2, "omega": [0]})")), Error);
  EXPECT_THROW(io::quench_spec_from_json(io::json::parse(R"({"Jx": 1})")), Error);
}

TEST(Records, WriteReadRoundTrip) {
  const std::vector<MeasurementRecord> recs{{0, 1, 2, 1, -1}, {1, 3, 4, -1, -1}, {2, 1, 4, 1, -1}};
  std::stringstream buf;
  io::write_records(buf, Scheme::Importance, recs);
  EXPECT_EQ(buf.str().substr(0, 40), "scheme,importance\nrun,j,k,beta,setting\n0");
  const io::RecordFile f = io::read_records(buf);
  EXPECT_EQ(f.scheme, Scheme::Importance);
  EXPECT_EQ(f.records, recs);
}

TEST(Records, ReadErrors) {
  auto kind_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      io::read_records(in);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ContractViolation;
  };
  EXPECT_EQ(kind_of(""), ErrorKind::EmptyInput);
  EXPECT_EQ(kind_of("run,j,k,beta,setting\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("scheme,importance\n0,1,2,1,0\n"), ErrorKind::MixedSchemeError);
  EXPECT_EQ(kind_of("scheme,entrywise\n0,1,2,1,-1\n"), ErrorKind::MixedSchemeError);
  EXPECT_EQ(kind_of("scheme,importance\n0;1;2;1;-1\n"), ErrorKind::ParseError);
  EXPECT_EQ(kind_of("scheme,bogus\n"), ErrorKind::ParseError);
}

TEST(ReportJson, Keys) {
  const CovarianceMatrix m = sample_target();
  const io::json w = io::to_json(witness_value(m, m));
  for (const char* key : {"f_w", "overlap_x", "abs_sum", "l", "omega_size", "tau"}) EXPECT_TRUE(w.contains(key)) << key;
  EstimatorResult r;
  r.scheme = Scheme::Entrywise;
  const io::json e = io::to_json(r);
  for (const char* key : {"f_w_star", "x_star", "n", "epsilon", "delta", "scheme", "seed"}) EXPECT_TRUE(e.contains(key)) << key;
  EXPECT_EQ(e.at("scheme"), "entrywise");
}

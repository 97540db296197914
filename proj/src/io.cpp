#include "ctlp/io.hpp"

#include <cstdio>
#include <ostream>

#include "ctlp/errors.hpp"

namespace ctlp {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& header) {
  if (!header.empty()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) os << ',';
      os << header[i];
    }
    os << '\n';
  }
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c) os << ',';
      os << format_double(M(r, c));
    }
    os << '\n';
  }
}

nlohmann::json gain_to_json(const GainSchedule& gain) {
  nlohmann::json j;
  j["m"] = gain.m;
  j["n"] = gain.n;
  j["N"] = gain.coeffs.basis.N;
  j["omega"] = gain.coeffs.basis.omega;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < gain.coeffs.W.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < gain.coeffs.W.cols(); ++c) {
      row.push_back(gain.coeffs.W(r, c));
    }
    rows.push_back(std::move(row));
  }
  j["coefficients"] = std::move(rows);
  return j;
}

GainSchedule gain_from_json(const nlohmann::json& j) {
  GainSchedule gain;
  gain.m = j.at("m").get<Eigen::Index>();
  gain.n = j.at("n").get<Eigen::Index>();
  gain.coeffs.basis = FourierBasis{j.at("N").get<int>(),
                                   j.at("omega").get<double>()};
  const auto& rows = j.at("coefficients");
  const Eigen::Index nr = static_cast<Eigen::Index>(rows.size());
  if (nr != gain.m * gain.n) {
    throw DimensionMismatch("gain_from_json: coefficient row count " +
                            std::to_string(nr) + " does not match m*n");
  }
  gain.coeffs.W.resize(nr, gain.coeffs.basis.size());
  for (Eigen::Index r = 0; r < nr; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    if (static_cast<Eigen::Index>(row.size()) != gain.coeffs.basis.size()) {
      throw DimensionMismatch("gain_from_json: coefficient row length "
                              "does not match 2N+1");
    }
    for (Eigen::Index c = 0; c < gain.coeffs.basis.size(); ++c) {
      gain.coeffs.W(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return gain;
}

}  // namespace ctlp

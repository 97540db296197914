#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "ctlp/periodic_system.hpp"

#include "json.hpp"

namespace ctlp {

/// Shortest round-trippable decimal representation, locale-independent.
std::string format_double(double v);

/// Plain CSV dump; header row is written when non-empty.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& M,
                      const std::vector<std::string>& header = {});

nlohmann::json gain_to_json(const GainSchedule& gain);
GainSchedule gain_from_json(const nlohmann::json& j);

}  // namespace ctlp

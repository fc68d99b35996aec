#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "zigzag/bench.hpp"

namespace zigzag::profile {

/// Dolan-More performance profile.
///
/// rho holds the sorted distinct finite cost ratios followed by +inf;
/// fraction[b][m] is the share of instances whose ratio for method m is at
/// most rho[b]. The +inf row is the solve rate.
struct Profile {
  std::vector<std::string> methods;
  std::vector<double> rho;
  std::vector<std::vector<double>> fraction;
  int instances = 0;
  std::vector<std::string> warnings;
};

/// costs[i][m]: cost of method m on instance i; +inf marks a failure.
/// Instances where every method failed are dropped with a warning.
Profile compute(const std::vector<std::string>& methods, const std::vector<std::vector<double>>& costs);

/// Iteration-count profile over the instances (set, kappa, epsilon,
/// replicate) of a report, one curve per method id.
Profile from_report(const bench::Report& report);

/// Fraction for `method` at ratio `rho` (step function evaluation).
double value_at(const Profile& p, std::size_t method, double rho);

void write_csv(std::ostream& out, const Profile& p, const std::vector<std::string>& metadata);

}  // namespace zigzag::profile

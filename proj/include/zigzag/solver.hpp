#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "zigzag/quadratic_model.hpp"
#include "zigzag/schedule.hpp"
#include "zigzag/stepsize.hpp"

namespace zigzag {

/// Stepsize for the initial step of rules that need one.
struct InitialAlpha {
  enum class Kind { exact_sd, fixed };
  Kind kind = Kind::exact_sd;
  double value = 0.0;

  /// "exact-sd" or "fixed:c".
  static InitialAlpha parse(std::string_view text);
  std::string to_string() const;
};

/// Exact SD step g0'g0 / g0'Ag0, or the fixed value.
double initial_alpha(const QuadraticProblem& problem, const Vector& g0, const InitialAlpha& policy);

enum class TraceLevel { none, scalars, eigencomponents };

struct SolverConfig {
  double epsilon = 1e-6;
  int max_iter = 20000;
  TraceLevel trace = TraceLevel::scalars;
  InitialAlpha alpha0;
  /// Record the small and large roots of H^k at every k >= 1.
  bool track_tilde = false;

  void validate() const;
};

enum class Status { converged, iter_cap, numerical_failure };

std::string_view to_string(Status s);
int exit_code(Status s);

struct TraceRecord {
  int k = 0;
  double f_gap = 0.0;
  double gnorm = 0.0;
  double alpha = 0.0;  // stepsize taken at k; NaN on the final record
  std::string_view tag;
};

struct IterateTrace {
  std::vector<TraceRecord> records;
  /// Eigencomponents of g_k, one vector per record (diagonal problems only).
  std::vector<Vector> mu;
  /// Roots of H^k aligned with records; NaN where undefined (k = 0).
  std::vector<step::TildeRoots> tilde;
  Status status = Status::converged;
  int iterations = 0;
  double g0_norm = 0.0;
  double final_gnorm = 0.0;
  std::string message;
};

/// Gradient iteration x_{k+1} = x_k - alpha_k g_k. The gradient is advanced
/// by g_{k+1} = g_k - alpha_k A g_k, one product with A per iteration.
/// Stops when ||g_k|| <= epsilon ||g_0|| or after max_iter steps.
IterateTrace run(const QuadraticProblem& problem, const Schedule& schedule, const SolverConfig& config,
                 const Vector& x0);

struct FiniteTermination {
  double lambda = 0.0;
  double mean_gnorm3 = 0.0;
  double mean_f3 = 0.0;
};

/// MG, tilde (Psi = A), MG on diag{1, lambda} with b = 0 from `n_starts`
/// points drawn uniformly in (-1, 1)^2.
FiniteTermination finite_termination_2d(double lambda, int n_starts, Rng& rng);

/// Trace CSV: '#' metadata lines, then k,f_gap,gnorm,alpha,rule with
/// optional alpha_tilde,alpha_bar and mu_1..mu_n columns.
void write_trace_csv(std::ostream& out, const IterateTrace& trace, const std::vector<std::string>& metadata);

}  // namespace zigzag

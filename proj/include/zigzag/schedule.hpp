#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "zigzag/stepsize.hpp"

namespace zigzag {

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which stepsize each iteration uses.
///
/// Grammar: sd, mg, family:u, bb1, bb2, yuan, dy, sdc:h:s, abbmin2[:tau[:m]],
/// alg1:<bb1|bb2>:<sd|mg>:Kb:Km:Ks, hat, aopt.
struct Schedule {
  enum class Kind { sd, mg, family, bb1, bb2, yuan, dy, sdc, abbmin2, alg1, hat, aopt };
  enum class Bb { bb1, bb2 };

  Kind kind = Kind::sd;
  int u = 0;  // family exponent; alg1 uses 0 (sd) or 1 (mg)
  int h = 8;
  int s = 6;
  double tau = 0.9;
  int memory = 9;
  Bb bb = Bb::bb1;
  int kb = 100;
  int km = 9;
  int ks = 9;

  static Schedule parse(std::string_view text);
  std::string to_string() const;
  void validate() const;

  /// Exponent u whose family stepsize the schedule uses (or whose H^k the
  /// tracked tilde stepsizes are built from).
  int family_exponent() const;
  /// True for rules that need an initial step before their own formula applies.
  bool takes_initial_step() const;
  /// f(x_k) - f* is nonincreasing under this schedule.
  bool monotone() const;
  /// Highest moment g'A^j g the rule reads.
  int moment_order() const;
};

enum class Alg1Phase { bb, family, tilde, tilde_reused };

/// Phase of schedule index j in the periodic method.
Alg1Phase alg1_phase(int j, int kb, int km, int ks);

struct StepChoice {
  double alpha = 0.0;
  std::string_view tag;
};

/// Stateful stepsize selection for one run. Holds the frozen short step and
/// the BB2 history; create one per run.
class Scheduler {
 public:
  explicit Scheduler(Schedule schedule);

  const Schedule& schedule() const { return schedule_; }

  /// Stepsize for iteration k. `alpha0` is used when k = 0 and the rule
  /// takes an initial step; the periodic method then reads its schedule at
  /// index k - 1.
  StepChoice next(int k, const step::StepState& state, double alpha0);

 private:
  Schedule schedule_;
  double frozen_ = 0.0;
  std::deque<double> bb2_history_;
};

}  // namespace zigzag

#include "zigzag/solver.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "zigzag/csv.hpp"

namespace zigzag {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

InitialAlpha InitialAlpha::parse(std::string_view text) {
  if (text == "exact-sd") return {};
  if (text.substr(0, 6) == "fixed:") {
    const std::string v(text.substr(6));
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v.empty() || used != v.size() || !(c > 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument(fmt::format("alpha0: fixed value must be a positive number, got '{}'", v));
    }
    return {Kind::fixed, c};
  }
  throw std::invalid_argument(fmt::format("alpha0: expected exact-sd or fixed:c, got '{}'", text));
}

std::string InitialAlpha::to_string() const {
  return kind == Kind::exact_sd ? std::string("exact-sd") : fmt::format("fixed:{}", value);
}

double initial_alpha(const QuadraticProblem& problem, const Vector& g0, const InitialAlpha& policy) {
  if (policy.kind == InitialAlpha::Kind::fixed) return policy.value;
  const double gg = g0.squaredNorm();
  if (gg == 0.0) throw step::ZeroGradient();
  return gg / g0.dot(problem.apply(g0));
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("solver: epsilon must lie in (0, 1)");
  if (max_iter < 1) throw std::invalid_argument("solver: max_iter must be >= 1");
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::iter_cap: return "iter_cap";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

int exit_code(Status s) {
  switch (s) {
    case Status::converged: return 0;
    case Status::iter_cap: return 2;
    case Status::numerical_failure: return 3;
  }
  return 3;
}

IterateTrace run(const QuadraticProblem& problem, const Schedule& schedule, const SolverConfig& config,
                 const Vector& x0) {
  config.validate();
  if (x0.size() != problem.dim()) {
    throw std::invalid_argument(fmt::format("solver: x0 has size {}, problem has {}", x0.size(), problem.dim()));
  }
  if (config.trace == TraceLevel::eigencomponents && !problem.is_diagonal()) {
    throw std::invalid_argument("solver: eigencomponent traces need a diagonal problem");
  }

  Scheduler scheduler(schedule);
  const int order = schedule.moment_order();
  const int u_track = schedule.family_exponent();
  const bool keep = config.trace != TraceLevel::none;

  IterateTrace trace;
  Vector g = problem.evaluate(x0).g;
  trace.g0_norm = g.norm();
  const double tol = config.epsilon * trace.g0_norm;

  step::StepState state;
  double alpha0 = kNaN;

  for (int k = 0;; ++k) {
    const double gnorm = g.norm();
    const double gap = problem.gap_from_gradient(g);
    trace.iterations = k;
    trace.final_gnorm = gnorm;

    if (!std::isfinite(gnorm) || !std::isfinite(gap)) {
      trace.status = Status::numerical_failure;
      trace.iterations = k > 0 ? k - 1 : 0;
      trace.message = fmt::format("non-finite gradient at k={}", k);
      break;
    }
    if (keep) {
      trace.records.push_back({k, gap, gnorm, kNaN, ""});
      if (config.trace == TraceLevel::eigencomponents) trace.mu.push_back(g);
    }
    if (gnorm <= tol || gnorm == 0.0) {
      trace.status = Status::converged;
      break;
    }
    if (k == config.max_iter) {
      trace.status = Status::iter_cap;
      break;
    }

    const Vector Ag = problem.apply(g);
    state.moments = step::compute_moments(problem, g, Ag, order);

    if (config.track_tilde && keep) {
      step::TildeRoots roots{kNaN, kNaN};
      if (state.prev) {
        try {
          roots = step::tilde_roots(step::family_H(state.prev->moments, state.moments, u_track));
        } catch (const step::StepError&) {
        }
      }
      trace.tilde.push_back(roots);
    }

    StepChoice choice;
    try {
      if (k == 0 && schedule.takes_initial_step()) alpha0 = initial_alpha(problem, g, config.alpha0);
      choice = scheduler.next(k, state, alpha0);
    } catch (const step::ZeroGradient&) {
      trace.status = Status::converged;
      break;
    } catch (const step::StepError& e) {
      trace.status = Status::numerical_failure;
      trace.message = fmt::format("k={}: {}", k, e.what());
      break;
    }
    if (!std::isfinite(choice.alpha) || !(choice.alpha > 0.0)) {
      trace.status = Status::numerical_failure;
      trace.message = fmt::format("k={}: invalid stepsize {}", k, choice.alpha);
      break;
    }
    if (keep) {
      trace.records.back().alpha = choice.alpha;
      trace.records.back().tag = choice.tag;
    }

    const double a = choice.alpha;
    // s = -a g, y = -a Ag
    state.secant = step::Secant{a * a * state.moments.gg(), a * a * state.moments.gAg(), a * a * state.moments.gA2g()};
    state.prev = step::StepState::Snapshot{state.moments, a};
    g -= a * Ag;
  }
  if (config.track_tilde && keep) {
    trace.tilde.resize(trace.records.size(), step::TildeRoots{kNaN, kNaN});
  }
  return trace;
}

FiniteTermination finite_termination_2d(double lambda, int n_starts, Rng& rng) {
  if (!(lambda > 1.0)) throw std::invalid_argument("ft2d: lambda must exceed 1");
  if (n_starts < 1) throw std::invalid_argument("ft2d: need at least one start");
  const QuadraticProblem problem = make_diagonal({1.0, lambda}, Vector::Zero(2));

  FiniteTermination out;
  out.lambda = lambda;
  for (int t = 0; t < n_starts; ++t) {
    Vector x(2);
    x << rng.open_uniform(-1.0, 1.0), rng.open_uniform(-1.0, 1.0);
    std::optional<step::GradientMoments> prev;
    for (int k = 0; k < 3; ++k) {
      const Vector g = problem.apply(x);
      if (g.squaredNorm() == 0.0) break;
      const auto m = step::compute_moments(problem, g, problem.apply(g), 2);
      const double a = k == 1 ? step::tilde_mg(step::mg(*prev), step::mg(m), prev->gAg(), m.gAg()) : step::mg(m);
      x -= a * g;
      prev = m;
    }
    const Vector g3 = problem.apply(x);
    out.mean_gnorm3 += g3.norm();
    out.mean_f3 += 0.5 * x.dot(g3);
  }
  out.mean_gnorm3 /= n_starts;
  out.mean_f3 /= n_starts;
  return out;
}

void write_trace_csv(std::ostream& out, const IterateTrace& trace, const std::vector<std::string>& metadata) {
  csv::write_metadata(out, metadata);
  out << "# status=" << to_string(trace.status) << " iterations=" << trace.iterations << '\n';
  const bool tilde = !trace.tilde.empty();
  const int n = trace.mu.empty() ? 0 : static_cast<int>(trace.mu.front().size());
  out << "k,f_gap,gnorm,alpha,rule";
  if (tilde) out << ",alpha_tilde,alpha_bar";
  for (int i = 1; i <= n; ++i) out << ",mu_" << i;
  out << '\n';
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto& rec = trace.records[r];
    out << rec.k << ',' << csv::num(rec.f_gap) << ',' << csv::num(rec.gnorm) << ',' << csv::num(rec.alpha) << ','
        << rec.tag;
    if (tilde) out << ',' << csv::num(trace.tilde[r].small) << ',' << csv::num(trace.tilde[r].large);
    for (int i = 0; i < n; ++i) out << ',' << csv::num(trace.mu[r][i]);
    out << '\n';
  }
}

}  // namespace zigzag

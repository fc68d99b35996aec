#include "zigzag/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "zigzag/asymptotics.hpp"
#include "zigzag/bench.hpp"
#include "zigzag/csv.hpp"
#include "zigzag/profile.hpp"
#include "zigzag/solver.hpp"

namespace zigzag::cli {
namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ProblemFlags {
  std::string spectrum = "set1";
  int n = 100;
  double kappa = 1e4;
  std::uint64_t seed = 0;
  bool rotated = false;
  std::string b_range = "0:0";
  std::string x0 = "ones";

  void add(CLI::App& app) {
    app.add_option("--spectrum", spectrum, "set1..set7, isqrt, uniform1n or twodim")->capture_default_str();
    app.add_option("--n", n, "dimension")->capture_default_str();
    app.add_option("--kappa", kappa, "condition number (table2 sets, twodim)")->capture_default_str();
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();
    app.add_flag("--rotated", rotated, "apply three random Householder reflections");
    app.add_option("--b-range", b_range, "lo:hi for the entries of b; 0:0 gives b = 0")->capture_default_str();
    app.add_option("--x0", x0, "ones or random")->capture_default_str();
  }

  SpectrumSpec spec() const {
    SpectrumSpec s;
    s.n = n;
    s.kappa = kappa;
    s.seed = seed;
    if (spectrum == "isqrt") {
      s.kind = SpectrumSpec::Kind::isqrt;
    } else if (spectrum == "uniform1n") {
      s.kind = SpectrumSpec::Kind::uniform1n;
    } else if (spectrum == "twodim") {
      s.kind = SpectrumSpec::Kind::twodim;
    } else if (spectrum.size() == 4 && spectrum.starts_with("set") && spectrum[3] >= '1' && spectrum[3] <= '7') {
      s.kind = SpectrumSpec::Kind::table2;
      s.set_id = spectrum[3] - '0';
    } else {
      throw UsageError(fmt::format("unknown spectrum '{}'", spectrum));
    }
    s.validate();
    return s;
  }

  Interval range() const {
    const auto parts = csv::split(b_range, ':');
    if (parts.size() != 2) throw UsageError("--b-range must be lo:hi");
    Interval r{csv::parse_num(parts[0]), csv::parse_num(parts[1])};
    if (r.lo > r.hi) throw UsageError("--b-range needs lo <= hi");
    return r;
  }

  QuadraticProblem build() const {
    const SpectrumSpec s = spec();
    const Interval r = range();
    if (rotated) return make_rotated(s, r);
    std::vector<double> lambda = make_spectrum(s);
    Vector b = Vector::Zero(static_cast<Eigen::Index>(lambda.size()));
    if (r.lo != r.hi) {
      Rng rng(mix_seed({seed, 0x62}));
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(r.lo, r.hi);
    }
    return make_diagonal(std::move(lambda), std::move(b));
  }

  Vector start(int dim) const {
    if (x0 == "ones") return Vector::Ones(dim);
    if (x0 == "random") {
      Rng rng(mix_seed({seed, 0x7830}));
      Vector x(dim);
      for (int i = 0; i < dim; ++i) x[i] = rng.uniform(-1.0, 1.0);
      return x;
    }
    throw UsageError(fmt::format("--x0 must be ones or random, got '{}'", x0));
  }

  std::string describe() const {
    return fmt::format("{} rotated={} x0={}", to_kv(spec(), range()), rotated ? 1 : 0, x0);
  }
};

std::string command_line(const std::vector<std::string>& args) {
  std::string s = "zigzag";
  for (const auto& a : args) s += " " + a;
  return s;
}

/// Writes `content` to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  f << content;
}

struct SolveFlags {
  ProblemFlags problem;
  std::string schedule;
  double eps = 1e-6;
  int max_iter = 20000;
  std::string alpha0 = "exact-sd";
  bool mu = false;
  bool track_tilde = false;
  std::string out;
};

int cmd_solve(const SolveFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const QuadraticProblem problem = f.problem.build();
  const Schedule schedule = Schedule::parse(f.schedule);
  SolverConfig cfg;
  cfg.epsilon = f.eps;
  cfg.max_iter = f.max_iter;
  cfg.alpha0 = InitialAlpha::parse(f.alpha0);
  cfg.track_tilde = f.track_tilde;
  cfg.trace = f.mu ? TraceLevel::eigencomponents : TraceLevel::scalars;
  cfg.validate();
  if (f.mu && !problem.is_diagonal()) throw UsageError("--mu needs a diagonal problem");
  const Vector x0 = f.problem.start(problem.dim());

  const IterateTrace trace = run(problem, schedule, cfg, x0);
  std::ostringstream buf;
  write_trace_csv(buf,
                  trace,
                  {command_line(args), f.problem.describe(),
                   fmt::format("schedule={} epsilon={} max_iter={} alpha0={}", schedule.to_string(), f.eps,
                               f.max_iter, cfg.alpha0.to_string()),
                   fmt::format("rng={}", kRngName)});
  emit(f.out, buf.str(), out);
  return exit_code(trace.status);
}

struct DiagnoseFlags {
  ProblemFlags problem;
  std::string schedule = "mg";
  double eps = 1e-12;
  int max_iter = 20000;
  int tail = 20;
  std::string exclusion = "vanishing";
  std::string out_dir = ".";
};

int cmd_diagnose(const DiagnoseFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.problem.rotated) throw UsageError("diagnose needs a diagonal problem");
  const QuadraticProblem problem = f.problem.build();
  const Schedule schedule = Schedule::parse(f.schedule);
  if (schedule.kind != Schedule::Kind::sd && schedule.kind != Schedule::Kind::mg &&
      schedule.kind != Schedule::Kind::family) {
    throw UsageError("diagnose needs a family schedule: sd, mg or family:u");
  }
  asym::Exclusion rule = asym::Exclusion::vanishing_factor;
  if (f.exclusion == "literal") {
    rule = asym::Exclusion::literal;
  } else if (f.exclusion != "vanishing") {
    throw UsageError("--exclusion must be vanishing or literal");
  }
  if (f.tail < 1) throw UsageError("--tail must be >= 1");
  SolverConfig cfg;
  cfg.epsilon = f.eps;
  cfg.max_iter = f.max_iter;
  cfg.trace = TraceLevel::eigencomponents;
  cfg.validate();
  const Vector x0 = f.problem.start(problem.dim());

  const IterateTrace trace = run(problem, schedule, cfg, x0);
  const auto model = asym::SpectralModel::make(problem.spectrum(), PsiFunction::monomial(schedule.family_exponent()));
  const int n = model.n();

  std::vector<std::string> md{command_line(args), f.problem.describe(),
                              fmt::format("schedule={} epsilon={} max_iter={}", schedule.to_string(), f.eps,
                                          f.max_iter),
                              fmt::format("status={} iterations={}", to_string(trace.status), trace.iterations)};
  std::ostringstream per_k;
  csv::write_metadata(per_k, md);
  per_k << "k,gamma,theta,alpha";
  for (int i = 1; i <= n; ++i) per_k << ",q_" << i;
  per_k << '\n';
  std::vector<double> alphas;
  for (std::size_t r = 0; r < trace.records.size(); ++r) {
    const auto q = asym::weights_from(trace.mu[r]);
    per_k << trace.records[r].k << ',' << csv::num(asym::gamma(q, model)) << ','
          << csv::num(asym::theta(q, model)) << ',' << csv::num(trace.records[r].alpha);
    for (double x : q) per_k << ',' << csv::num(x);
    per_k << '\n';
    if (std::isfinite(trace.records[r].alpha)) alphas.push_back(trace.records[r].alpha);
  }

  std::vector<std::pair<std::string, std::string>> summary;
  auto put = [&](std::string key, double v) { summary.emplace_back(std::move(key), csv::num(v)); };
  std::vector<std::string> notes;
  try {
    const auto c = asym::estimate_c(trace, model.psi1(), model.psin(), f.tail);
    put("c_even", c.even);
    put("c_odd", c.odd);
    put("c_discrepancy", c.discrepancy);
    summary.emplace_back("c_sign_stable", c.sign_stable ? "1" : "0");
    const auto lim = asym::predict_alpha_limits(c.even, model.psi1(), model.psin(), model.lambda.front(),
                                                model.lambda.back());
    put("alpha_even_pred", lim.even);
    put("alpha_odd_pred", lim.odd);
    const auto pred = asym::predict_rates(c.even, model.kappa(), model.psi1(), model.psin());
    const auto obs = asym::observed_rates(trace, f.tail);
    put("rf1_pred", pred.rf1);
    put("rf1_obs", obs.rf1);
    put("rf2_pred", pred.rf2);
    put("rf2_obs", obs.rf2);
    put("rg1_pred", pred.rg1);
    put("rg1_obs", obs.rg1);
    put("rg2_pred", pred.rg2);
    put("rg2_obs", obs.rg2);
    put("rate_product", pred.product);
    put("c2", c.even * c.even);
  } catch (const asym::AsymError& e) {
    notes.push_back(fmt::format("c estimate unavailable: {}", e.what()));
  }
  try {
    const auto interior = asym::interior_set(problem.spectrum(), asym::weights_from(trace.mu.front()), alphas, rule);
    const auto b = asym::c_bound(problem.spectrum(), model.psi1(), model.psin(), interior);
    put("c2_lower", b.lower);
    put("c2_upper", b.upper);
    put("sigma", b.sigma);
    put("phi_sigma", b.phi);
  } catch (const asym::AsymError& e) {
    notes.push_back(fmt::format("c bound unavailable: {}", e.what()));
  }

  std::ostringstream sum;
  csv::write_metadata(sum, md);
  csv::write_metadata(sum, notes);
  sum << "key,value\n";
  for (const auto& [k, v] : summary) sum << k << ',' << v << '\n';

  std::filesystem::create_directories(f.out_dir);
  emit((std::filesystem::path(f.out_dir) / "diagnose.csv").string(), per_k.str(), out);
  emit((std::filesystem::path(f.out_dir) / "diagnose_summary.csv").string(), sum.str(), out);
  out << sum.str();
  return exit_code(trace.status);
}

struct Ft2dFlags {
  std::vector<double> lambdas{10, 100, 1000, 10000};
  int starts = 10;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_ft2d(const Ft2dFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  if (f.starts < 1) throw UsageError("--starts must be >= 1");
  for (double l : f.lambdas) {
    if (!(l > 1.0)) throw UsageError("--lambdas entries must exceed 1");
  }
  Rng rng(f.seed);
  std::ostringstream buf;
  csv::write_metadata(buf, {command_line(args), fmt::format("starts={} seed={} rng={}", f.starts, f.seed, kRngName)});
  buf << "lambda,mean_gnorm3,mean_f3\n";
  for (double l : f.lambdas) {
    const auto r = finite_termination_2d(l, f.starts, rng);
    buf << csv::num(l) << ',' << csv::num(r.mean_gnorm3) << ',' << csv::num(r.mean_f3) << '\n';
  }
  if (!f.out.empty() && f.out != "-") emit(f.out, buf.str(), out);
  out << buf.str();
  return 0;
}

struct BenchFlags {
  std::vector<int> sets{1, 2, 3, 4, 5, 6, 7};
  std::vector<double> kappas{1e4, 1e5, 1e6};
  std::vector<double> epsilons{1e-6, 1e-9, 1e-12};
  int n = 1000;
  int replicates = 10;
  std::uint64_t seed = 1;
  std::vector<std::string> methods = bench::default_methods();
  std::vector<std::string> km_ks;
  int kb = 0;
  int max_iter = 20000;
  int threads = 0;
  std::string out_dir;
};

int cmd_bench(const BenchFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  bench::GridSpec spec;
  spec.sets = f.sets;
  spec.kappas = f.kappas;
  spec.epsilons = f.epsilons;
  spec.n = f.n;
  spec.replicates = f.replicates;
  spec.base_seed = f.seed;
  spec.methods = f.methods;
  spec.kb = f.kb;
  spec.max_iter = f.max_iter;
  spec.threads = f.threads;
  if (!f.km_ks.empty()) {
    spec.km_ks.clear();
    for (const auto& p : f.km_ks) {
      const auto parts = csv::split(p, ':');
      if (parts.size() != 2) throw UsageError("--km-ks entries must be Km:Ks");
      spec.km_ks.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]));
    }
  }
  spec.validate();

  const bench::Report report = bench::run_grid(spec);
  auto md = report.metadata;
  md.insert(md.begin(), command_line(args));

  std::ostringstream rep;
  bench::write_report(rep, {md, report.rows});
  std::ostringstream sum;
  bench::write_summary(sum, bench::aggregate(report), md);
  std::ostringstream prof;
  std::vector<std::string> warnings;
  bool have_profile = false;
  try {
    const auto p = profile::from_report(report);
    profile::write_csv(prof, p, md);
    have_profile = true;
  } catch (const std::invalid_argument& e) {
    warnings.push_back(e.what());
  }

  std::filesystem::create_directories(f.out_dir);
  const std::filesystem::path dir(f.out_dir);
  emit((dir / "report.csv").string(), rep.str(), out);
  emit((dir / "summary.csv").string(), sum.str(), out);
  if (have_profile) emit((dir / "profile_iterations.csv").string(), prof.str(), out);
  for (const auto& w : warnings) out << "warning: " << w << '\n';
  out << sum.str();

  bool capped = false;
  bool broken = false;
  for (const auto& r : report.rows) {
    capped = capped || r.status == Status::iter_cap;
    broken = broken || r.status == Status::numerical_failure;
  }
  return broken ? 3 : (capped ? 2 : 0);
}

int cmd_profile(const std::string& in_path, const std::string& out_path, const std::vector<std::string>& args,
                std::ostream& out, std::ostream& err) {
  std::ifstream in(in_path);
  if (!in) throw UsageError(fmt::format("cannot read '{}'", in_path));
  const bench::Report report = bench::read_report(in);
  const auto p = profile::from_report(report);
  for (const auto& w : p.warnings) err << "warning: " << w << '\n';
  std::ostringstream buf;
  profile::write_csv(buf, p, {command_line(args), fmt::format("metric=iterations input={}", in_path)});
  emit(out_path, buf.str(), out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gradient methods with zigzag-breaking stepsizes for convex quadratics", "zigzag"};
  app.require_subcommand(1);

  SolveFlags solve;
  auto* s = app.add_subcommand("solve", "run one schedule and write its trace CSV");
  solve.problem.add(*s);
  s->add_option("--schedule", solve.schedule, "stepsize schedule, e.g. mg, bb1, alg1:bb1:sd:30:9:9")->required();
  s->add_option("--eps", solve.eps, "stop when ||g_k|| <= eps ||g_0||")->capture_default_str();
  s->add_option("--max-iter", solve.max_iter, "iteration cap")->capture_default_str();
  s->add_option("--alpha0", solve.alpha0, "initial step: exact-sd or fixed:c")->capture_default_str();
  s->add_flag("--mu", solve.mu, "add eigencomponent columns (diagonal problems)");
  s->add_flag("--track-tilde", solve.track_tilde, "add the small and large roots of H^k");
  s->add_option("--out", solve.out, "output file (default stdout)");

  DiagnoseFlags diag;
  auto* d = app.add_subcommand("diagnose", "two-cycle diagnostics for a family schedule");
  diag.problem.add(*d);
  d->add_option("--schedule", diag.schedule, "sd, mg or family:u")->capture_default_str();
  d->add_option("--eps", diag.eps)->capture_default_str();
  d->add_option("--max-iter", diag.max_iter)->capture_default_str();
  d->add_option("--tail", diag.tail, "tail length for c and rate estimates")->capture_default_str();
  d->add_option("--exclusion", diag.exclusion, "interior index exclusion: vanishing or literal")
      ->capture_default_str();
  d->add_option("--out", diag.out_dir, "output directory")->capture_default_str();

  Ft2dFlags ft;
  auto* t = app.add_subcommand("ft2d", "finite termination on diag{1, lambda}");
  t->add_option("--lambdas", ft.lambdas)->delimiter(',')->capture_default_str();
  t->add_option("--starts", ft.starts)->capture_default_str();
  t->add_option("--seed", ft.seed)->capture_default_str();
  t->add_option("--out", ft.out, "also write the table to this file");

  BenchFlags bf;
  auto* b = app.add_subcommand("bench", "run the benchmark grid");
  b->add_option("--sets", bf.sets)->delimiter(',')->capture_default_str();
  b->add_option("--kappas", bf.kappas)->delimiter(',')->capture_default_str();
  b->add_option("--epsilons", bf.epsilons)->delimiter(',')->capture_default_str();
  b->add_option("--n", bf.n)->capture_default_str();
  b->add_option("--replicates", bf.replicates)->capture_default_str();
  b->add_option("--seed", bf.seed)->capture_default_str();
  b->add_option("--methods", bf.methods)->delimiter(',')->capture_default_str();
  b->add_option("--km-ks", bf.km_ks, "Km:Ks pairs for short alg1 methods")->delimiter(',');
  b->add_option("--kb", bf.kb, "Kb for short alg1 methods; 0 uses 100 for sets 1, 5 and 30 otherwise")
      ->capture_default_str();
  b->add_option("--max-iter", bf.max_iter)->capture_default_str();
  b->add_option("--threads", bf.threads, "worker threads; 0 uses all cores")->capture_default_str();
  b->add_option("--out", bf.out_dir, "output directory")->required();

  std::string prof_in;
  std::string prof_out;
  auto* p = app.add_subcommand("profile", "performance profile of a benchmark report");
  p->add_option("--in", prof_in, "report.csv")->required();
  p->add_option("--out", prof_out, "output file (default stdout)");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_solve(solve, args, out);
    if (d->parsed()) return cmd_diagnose(diag, args, out);
    if (t->parsed()) return cmd_ft2d(ft, args, out);
    if (b->parsed()) return cmd_bench(bf, args, out);
    if (p->parsed()) return cmd_profile(prof_in, prof_out, args, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return kExitUsage;
}

}  // namespace zigzag::cli

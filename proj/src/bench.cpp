#include "zigzag/bench.hpp"

#include <atomic>
#include <charconv>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "zigzag/csv.hpp"
#include "zigzag/schedule.hpp"

namespace zigzag::bench {
namespace {

Status parse_status(const std::string& s) {
  if (s == "converged") return Status::converged;
  if (s == "iter_cap") return Status::iter_cap;
  if (s == "numerical_failure") return Status::numerical_failure;
  throw std::invalid_argument(fmt::format("report: unknown status '{}'", s));
}

template <class T>
T parse_integer(const std::string& s, std::string_view what) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument(fmt::format("report: bad {} '{}'", what, s));
  }
  return v;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string join_nums(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt::format("{}", v[i]);
  return s;
}

}  // namespace

std::vector<std::string> default_methods() {
  return {"bb1", "dy", "sdc:8:6", "abbmin2:0.9", "alg1:bb1:sd", "alg1:bb2:sd", "alg1:bb1:mg", "alg1:bb2:mg"};
}

int default_kb(int set_id) { return set_id == 1 || set_id == 5 ? 100 : 30; }

void GridSpec::validate() const {
  if (sets.empty() || kappas.empty() || epsilons.empty() || methods.empty()) {
    throw std::invalid_argument("bench: sets, kappas, epsilons and methods must be nonempty");
  }
  if (replicates < 1) throw std::invalid_argument("bench: replicates must be >= 1");
  if (max_iter < 1) throw std::invalid_argument("bench: max_iter must be >= 1");
  if (kb < 0) throw std::invalid_argument("bench: Kb must be >= 0");
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw std::invalid_argument("bench: epsilons must lie in (0, 1)");
  }
  for (int s : sets) {
    for (double k : kappas) {
      SpectrumSpec sp;
      sp.set_id = s;
      sp.n = n;
      sp.kappa = k;
      sp.validate();
      Rng probe(0);
      table2_spectrum(s, n, k, probe);
    }
    for (const auto& m : methods) expand(m, *this, s);
  }
}

std::vector<std::string> GridSpec::metadata() const {
  std::vector<std::string> md;
  md.push_back(fmt::format("command=bench sets={} kappas={} epsilons={} n={} replicates={} seed={} max_iter={}",
                           join_ints(sets), join_nums(kappas), join_nums(epsilons), n, replicates, base_seed,
                           max_iter));
  std::string ms;
  for (std::size_t i = 0; i < methods.size(); ++i) ms += (i ? "," : "") + methods[i];
  std::string grid;
  for (std::size_t i = 0; i < km_ks.size(); ++i) {
    grid += fmt::format("{}{}:{}", i ? "," : "", km_ks[i].first, km_ks[i].second);
  }
  md.push_back(fmt::format("methods={} km_ks={} kb={} b_range={}:{} x0=ones", ms, grid,
                           kb == 0 ? std::string("policy") : std::to_string(kb), b_range.lo, b_range.hi));
  md.push_back(fmt::format("rng={}", kRngName));
  return md;
}

std::vector<Variant> expand(const std::string& method, const GridSpec& spec, int set_id) {
  const std::vector<std::string> parts = csv::split(method, ':');
  const int kb = spec.kb > 0 ? spec.kb : default_kb(set_id);
  if (parts[0] == "alg1" && parts.size() == 3) {
    std::vector<Variant> out;
    for (const auto& [km, ks] : spec.km_ks) {
      Variant v{method, fmt::format("Km={};Ks={}", km, ks),
                fmt::format("{}:{}:{}:{}:{}:{}", parts[0], parts[1], parts[2], kb, km, ks)};
      v.schedule = Schedule::parse(v.schedule).to_string();
      out.push_back(std::move(v));
    }
    if (out.empty()) throw std::invalid_argument("bench: empty Km/Ks grid");
    return out;
  }
  return {Variant{method, "", Schedule::parse(method).to_string()}};
}

std::uint64_t instance_seed(int set_id, double kappa, double epsilon, std::uint64_t base_seed, int replicate) {
  return mix_seed({static_cast<std::uint64_t>(set_id), double_bits(kappa), double_bits(epsilon), base_seed,
                   static_cast<std::uint64_t>(replicate)});
}

Report run_grid(const GridSpec& spec) {
  spec.validate();

  struct Job {
    int set;
    double kappa;
    double epsilon;
    int replicate;
    std::size_t first_row;
    std::vector<Variant> variants;
  };
  std::vector<Job> jobs;
  std::size_t rows = 0;
  for (int s : spec.sets) {
    std::vector<Variant> variants;
    for (const auto& m : spec.methods) {
      auto v = expand(m, spec, s);
      variants.insert(variants.end(), v.begin(), v.end());
    }
    for (double k : spec.kappas) {
      for (double e : spec.epsilons) {
        for (int r = 0; r < spec.replicates; ++r) {
          jobs.push_back({s, k, e, r, rows, variants});
          rows += variants.size();
        }
      }
    }
  }

  Report report;
  report.metadata = spec.metadata();
  report.rows.resize(rows);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      const Job& job = jobs[j];
      SpectrumSpec sp;
      sp.kind = SpectrumSpec::Kind::table2;
      sp.set_id = job.set;
      sp.n = spec.n;
      sp.kappa = job.kappa;
      sp.seed = instance_seed(job.set, job.kappa, job.epsilon, spec.base_seed, job.replicate);
      const QuadraticProblem problem = make_rotated(sp, spec.b_range);
      const std::uint64_t hash = problem.fingerprint();
      const Vector x0 = Vector::Ones(problem.dim());
      SolverConfig cfg;
      cfg.epsilon = job.epsilon;
      cfg.max_iter = spec.max_iter;
      cfg.trace = TraceLevel::none;
      for (std::size_t v = 0; v < job.variants.size(); ++v) {
        const Variant& var = job.variants[v];
        Row& row = report.rows[job.first_row + v];
        row.set = job.set;
        row.kappa = job.kappa;
        row.epsilon = job.epsilon;
        row.method = var.method;
        row.params = var.params;
        row.schedule = var.schedule;
        row.replicate = job.replicate;
        row.problem_hash = hash;
        try {
          const IterateTrace t = run(problem, Schedule::parse(var.schedule), cfg, x0);
          row.iterations = t.iterations;
          row.status = t.status;
        } catch (const std::exception&) {
          row.iterations = spec.max_iter;
          row.status = Status::numerical_failure;
        }
      }
    }
  };

  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return report;
}

void write_report(std::ostream& out, const Report& report) {
  csv::write_metadata(out, report.metadata);
  out << "set,kappa,epsilon,method,params,schedule,replicate,iterations,status,problem_hash\n";
  for (const Row& r : report.rows) {
    out << r.set << ',' << csv::num(r.kappa) << ',' << csv::num(r.epsilon) << ',' << r.method << ',' << r.params
        << ',' << r.schedule << ',' << r.replicate << ',' << r.iterations << ',' << to_string(r.status) << ','
        << fmt::format("{:016x}", r.problem_hash) << '\n';
  }
}

Report read_report(std::istream& in) {
  const csv::Table t = csv::read(in);
  if (t.header.empty()) throw std::invalid_argument("report: missing header");
  const std::size_t c_set = t.column("set");
  const std::size_t c_kappa = t.column("kappa");
  const std::size_t c_eps = t.column("epsilon");
  const std::size_t c_method = t.column("method");
  const std::size_t c_params = t.column("params");
  const std::size_t c_rep = t.column("replicate");
  const std::size_t c_iter = t.column("iterations");
  const std::size_t c_status = t.column("status");
  Report r;
  r.metadata = t.metadata;
  for (const auto& f : t.rows) {
    Row row;
    row.set = parse_integer<int>(f[c_set], "set");
    row.kappa = csv::parse_num(f[c_kappa]);
    row.epsilon = csv::parse_num(f[c_eps]);
    row.method = f[c_method];
    row.params = f[c_params];
    row.replicate = parse_integer<int>(f[c_rep], "replicate");
    row.iterations = parse_integer<int>(f[c_iter], "iterations");
    row.status = parse_status(f[c_status]);
    for (std::size_t i = 0; i < t.header.size(); ++i) {
      if (t.header[i] == "schedule") row.schedule = f[i];
      if (t.header[i] == "problem_hash") {
        const std::string& h = f[i];
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(h.data(), h.data() + h.size(), v, 16);
        if (ec != std::errc() || p != h.data() + h.size()) {
          throw std::invalid_argument(fmt::format("report: bad problem_hash '{}'", h));
        }
        row.problem_hash = v;
      }
    }
    r.rows.push_back(std::move(row));
  }
  return r;
}

Aggregate aggregate(const Report& report) {
  Aggregate agg;
  std::map<std::string, std::size_t> order;
  for (const Row& r : report.rows) {
    if (order.emplace(r.id(), order.size()).second) agg.ids.push_back(r.id());
  }
  auto rank = [&](const std::string& id) { return order.at(id); };

  struct Acc {
    double sum = 0.0;
    int count = 0;
    bool failed = false;
  };
  using CellKey = std::tuple<int, double, double, std::size_t>;
  std::map<CellKey, Acc> cells;
  for (const Row& r : report.rows) {
    Acc& a = cells[{r.set, r.epsilon, r.kappa, rank(r.id())}];
    a.sum += r.iterations;
    ++a.count;
    a.failed = a.failed || r.failed();
  }
  using SetKey = std::tuple<int, double, std::size_t>;
  std::map<SetKey, Acc> sets;
  for (const auto& [key, a] : cells) {
    const auto& [set, eps, kappa, id] = key;
    const double mean = a.sum / a.count;
    agg.cells.push_back({set, kappa, eps, agg.ids[id], mean, a.failed});
    Acc& s = sets[{set, eps, id}];
    s.sum += mean;
    ++s.count;
    s.failed = s.failed || a.failed;
  }
  using TotKey = std::pair<double, std::size_t>;
  std::map<TotKey, std::vector<double>> tot_means;
  std::map<TotKey, bool> tot_failed;
  for (const auto& [key, s] : sets) {
    const auto& [set, eps, id] = key;
    const double mean = s.sum / s.count;
    agg.sets.push_back({set, eps, agg.ids[id], mean, s.failed});
    tot_means[{eps, id}].push_back(mean);
    tot_failed[{eps, id}] = tot_failed[{eps, id}] || s.failed;
  }
  for (const auto& [key, means] : tot_means) {
    agg.totals.push_back({key.first, agg.ids[key.second], total_of(means), tot_failed[key]});
  }
  return agg;
}

double total_of(const std::vector<double>& set_means) {
  double t = 0.0;
  for (double m : set_means) t += m;
  return t;
}

void write_summary(std::ostream& out, const Aggregate& agg, const std::vector<std::string>& metadata) {
  csv::write_metadata(out, metadata);
  out << "set,epsilon";
  for (const auto& id : agg.ids) out << ',' << id;
  out << '\n';

  auto cell = [](double v, bool failed) { return fmt::format("{:.1f}{}", v, failed ? "*" : ""); };
  std::map<std::pair<int, double>, std::map<std::string, std::string>> table;
  for (const SetMean& s : agg.sets) table[{s.set, s.epsilon}][s.id] = cell(s.mean, s.failed);
  std::map<double, std::map<std::string, std::string>> totals;
  for (const Total& t : agg.totals) totals[t.epsilon][t.id] = cell(t.total, t.failed);

  auto emit = [&](const std::string& label, double eps, const std::map<std::string, std::string>& vals) {
    out << label << ',' << csv::num(eps);
    for (const auto& id : agg.ids) {
      const auto it = vals.find(id);
      out << ',' << (it == vals.end() ? "" : it->second);
    }
    out << '\n';
  };
  for (const auto& [key, vals] : table) emit(std::to_string(key.first), key.second, vals);
  for (const auto& [eps, vals] : totals) emit("total", eps, vals);
}

}  // namespace zigzag::bench

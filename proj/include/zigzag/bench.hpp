#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "zigzag/quadratic_model.hpp"
#include "zigzag/solver.hpp"

namespace zigzag::bench {

/// Benchmark grid. Every instance (set, kappa, epsilon, replicate) gets one
/// random rotated problem shared by all methods, started from x0 = ones.
struct GridSpec {
  std::vector<int> sets{1, 2, 3, 4, 5, 6, 7};
  std::vector<double> kappas{1e4, 1e5, 1e6};
  std::vector<double> epsilons{1e-6, 1e-9, 1e-12};
  int replicates = 10;
  int n = 1000;
  std::uint64_t base_seed = 1;
  /// Schedule strings. "alg1:<bb>:<sd|mg>" expands over `km_ks` with Kb
  /// from the per-set policy; a full alg1 string runs as given.
  std::vector<std::string> methods;
  std::vector<std::pair<int, int>> km_ks{{9, 9}, {9, 13}, {9, 15}, {13, 9}, {13, 13},
                                         {13, 15}, {15, 9}, {15, 13}, {15, 15}};
  int kb = 0;  // 0: 100 for sets 1 and 5, 30 otherwise
  int max_iter = 20000;
  Interval b_range{-10.0, 10.0};
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
  std::vector<std::string> metadata() const;
};

std::vector<std::string> default_methods();
int default_kb(int set_id);

struct Variant {
  std::string method;    // as listed in GridSpec::methods
  std::string params;    // e.g. "Km=9;Ks=13", empty when not expanded
  std::string schedule;  // full schedule string

  std::string id() const { return params.empty() ? method : method + "(" + params + ")"; }
};

/// Variants of one method string for a given set.
std::vector<Variant> expand(const std::string& method, const GridSpec& spec, int set_id);

std::uint64_t instance_seed(int set_id, double kappa, double epsilon, std::uint64_t base_seed, int replicate);

struct Row {
  int set = 0;
  double kappa = 0.0;
  double epsilon = 0.0;
  std::string method;
  std::string params;
  std::string schedule;
  int replicate = 0;
  int iterations = 0;
  Status status = Status::converged;
  std::uint64_t problem_hash = 0;

  std::string id() const { return params.empty() ? method : method + "(" + params + ")"; }
  bool failed() const { return status != Status::converged; }
};

struct Report {
  std::vector<std::string> metadata;
  std::vector<Row> rows;
};

/// Runs every (instance, variant) pair. Failures are recorded, never thrown.
/// Row order is fixed by the grid, independent of thread count.
Report run_grid(const GridSpec& spec);

void write_report(std::ostream& out, const Report& report);
Report read_report(std::istream& in);

struct CellMean {
  int set = 0;
  double kappa = 0.0;
  double epsilon = 0.0;
  std::string id;
  double mean = 0.0;
  bool failed = false;
};

struct SetMean {
  int set = 0;
  double epsilon = 0.0;
  std::string id;
  double mean = 0.0;
  bool failed = false;
};

struct Total {
  double epsilon = 0.0;
  std::string id;
  double total = 0.0;
  bool failed = false;
};

struct Aggregate {
  std::vector<CellMean> cells;  // mean over replicates
  std::vector<SetMean> sets;    // then mean over kappa
  std::vector<Total> totals;    // sum of set means per epsilon
  std::vector<std::string> ids; // method ids in first-seen order
};

Aggregate aggregate(const Report& report);

/// Sum of per-set means, as in a table's total row.
double total_of(const std::vector<double>& set_means);

/// One row per (set or "total", epsilon), one column per method id. Failed
/// cells carry a trailing '*'.
void write_summary(std::ostream& out, const Aggregate& agg, const std::vector<std::string>& metadata);

}  // namespace zigzag::bench

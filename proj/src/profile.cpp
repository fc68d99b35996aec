#include "zigzag/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <tuple>

#include <fmt/format.h>

#include "zigzag/csv.hpp"

namespace zigzag::profile {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(double cost, double best) {
  if (std::isinf(cost)) return kInf;
  if (best == 0.0) return cost == 0.0 ? 1.0 : kInf;
  return cost / best;
}

}  // namespace

Profile compute(const std::vector<std::string>& methods, const std::vector<std::vector<double>>& costs) {
  if (methods.empty()) throw std::invalid_argument("profile: no methods");
  Profile p;
  p.methods = methods;
  const std::size_t nm = methods.size();

  std::vector<std::vector<double>> ratios;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    const auto& c = costs[i];
    if (c.size() != nm) throw std::invalid_argument("profile: cost row does not match method count");
    const double best = *std::min_element(c.begin(), c.end());
    if (std::isinf(best)) {
      p.warnings.push_back(fmt::format("instance {} dropped: every method failed", i));
      continue;
    }
    std::vector<double> r(nm);
    for (std::size_t m = 0; m < nm; ++m) r[m] = ratio(c[m], best);
    ratios.push_back(std::move(r));
  }
  p.instances = static_cast<int>(ratios.size());
  if (ratios.empty()) throw std::invalid_argument("profile: no instance has a successful method");

  for (const auto& r : ratios) {
    for (double x : r) {
      if (std::isfinite(x)) p.rho.push_back(x);
    }
  }
  std::sort(p.rho.begin(), p.rho.end());
  p.rho.erase(std::unique(p.rho.begin(), p.rho.end()), p.rho.end());
  p.rho.push_back(kInf);

  for (double rho : p.rho) {
    std::vector<double> row(nm, 0.0);
    for (std::size_t m = 0; m < nm; ++m) {
      int hits = 0;
      for (const auto& r : ratios) {
        if (std::isinf(rho) ? std::isfinite(r[m]) : r[m] <= rho) ++hits;
      }
      row[m] = static_cast<double>(hits) / static_cast<double>(ratios.size());
    }
    p.fraction.push_back(std::move(row));
  }
  return p;
}

Profile from_report(const bench::Report& report) {
  std::vector<std::string> methods;
  std::map<std::string, std::size_t> index;
  for (const auto& r : report.rows) {
    if (index.emplace(r.id(), methods.size()).second) methods.push_back(r.id());
  }
  if (methods.size() < 2) throw std::invalid_argument("profile: need at least two methods");
  using Key = std::tuple<int, double, double, int>;
  std::map<Key, std::vector<double>> inst;
  for (const auto& r : report.rows) {
    auto& row = inst.try_emplace({r.set, r.kappa, r.epsilon, r.replicate}, methods.size(), std::numeric_limits<double>::quiet_NaN()).first->second;
    row[index.at(r.id())] = r.failed() ? kInf : static_cast<double>(r.iterations);
  }
  std::vector<std::vector<double>> costs;
  for (auto& [key, row] : inst) {
    for (double c : row) {
      if (std::isnan(c)) {
        throw std::invalid_argument(fmt::format("profile: instance set={} kappa={} epsilon={} replicate={} lacks a method",
                                                std::get<0>(key), std::get<1>(key), std::get<2>(key),
                                                std::get<3>(key)));
      }
    }
    costs.push_back(row);
  }
  return compute(methods, costs);
}

double value_at(const Profile& p, std::size_t method, double rho) {
  double v = 0.0;
  for (std::size_t b = 0; b < p.rho.size(); ++b) {
    if (p.rho[b] <= rho) v = p.fraction[b][method];
  }
  return v;
}

void write_csv(std::ostream& out, const Profile& p, const std::vector<std::string>& metadata) {
  csv::write_metadata(out, metadata);
  out << "# instances=" << p.instances << '\n';
  for (const auto& w : p.warnings) out << "# warning: " << w << '\n';
  out << "rho";
  for (const auto& m : p.methods) out << ',' << m;
  out << '\n';
  for (std::size_t b = 0; b < p.rho.size(); ++b) {
    out << csv::num(p.rho[b]);
    for (double f : p.fraction[b]) out << ',' << csv::num(f);
    out << '\n';
  }
}

}  // namespace zigzag::profile

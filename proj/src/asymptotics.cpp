#include "zigzag/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace zigzag::asym {
namespace {

double sq(double x) { return x * x; }

void check_weights(const Weights& p, const SpectralModel& m) {
  if (static_cast<int>(p.size()) != m.n()) {
    throw AsymError(fmt::format("weights have size {}, spectrum has {}", p.size(), m.n()));
  }
}

}  // namespace

SpectralModel SpectralModel::make(std::span<const double> spectrum, const PsiFunction& psi) {
  SpectralModel m;
  m.lambda.assign(spectrum.begin(), spectrum.end());
  m.psi = psi.on(spectrum);
  return m;
}

Weights weights_from(const Vector& mu) {
  const double nn = mu.squaredNorm();
  if (nn == 0.0) throw AsymError("weights: zero vector");
  Weights q(static_cast<std::size_t>(mu.size()));
  for (Eigen::Index i = 0; i < mu.size(); ++i) q[static_cast<std::size_t>(i)] = mu[i] * mu[i] / nn;
  return q;
}

double gamma(const Weights& p, const SpectralModel& m) {
  check_weights(p, m);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    num += m.psi[i] * m.lambda[i] * p[i];
    den += m.psi[i] * p[i];
  }
  if (!(den > 0.0)) throw AsymError("gamma: weights are all zero");
  return num / den;
}

double theta(const Weights& p, const SpectralModel& m) {
  const double g = gamma(p, m);
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    num += m.psi[i] * sq(m.lambda[i] - g) * p[i];
    den += m.psi[i] * p[i];
  }
  return num / den;
}

Weights apply_T(const Weights& p, const SpectralModel& m) {
  const double g = gamma(p, m);
  Weights out(p.size());
  double total = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    out[i] = sq(m.lambda[i] - g) * p[i];
    total += out[i];
  }
  if (!(total > 0.0)) throw AsymError("T undefined: gradient would vanish");
  for (double& x : out) x /= total;
  return out;
}

TwoCycle two_cycle(int i1, int i2, double p_i1, const SpectralModel& m) {
  if (i1 < 0 || i2 >= m.n() || i1 >= i2) throw AsymError("two_cycle: need 0 <= i1 < i2 < n");
  if (m.lambda[i1] == m.lambda[i2]) throw AsymError("two_cycle: support eigenvalues coincide");
  if (!(p_i1 > 0.0 && p_i1 < 1.0)) throw AsymError("two_cycle: weight must lie in (0, 1)");
  TwoCycle t;
  t.i1 = i1;
  t.i2 = i2;
  const double p2 = 1.0 - p_i1;
  t.p_star.assign(m.lambda.size(), 0.0);
  t.p_star[i1] = p_i1;
  t.p_star[i2] = p2;
  const double a = sq(m.psi[i1]) * p_i1;
  const double b = sq(m.psi[i2]) * p2;
  t.tp_star.assign(m.lambda.size(), 0.0);
  t.tp_star[i1] = b / (a + b);
  t.tp_star[i2] = a / (a + b);
  t.c = std::sqrt(p2 / p_i1);
  t.gamma_p = gamma(t.p_star, m);
  t.gamma_tp = gamma(t.tp_star, m);
  return t;
}

TwoCycle two_cycle_fixed_point(int i1, int i2, const SpectralModel& m) {
  if (i1 < 0 || i2 >= m.n() || i1 >= i2) throw AsymError("two_cycle: need 0 <= i1 < i2 < n");
  return two_cycle(i1, i2, m.psi[i2] / (m.psi[i1] + m.psi[i2]), m);
}

Weights even_limit(double c, int n) {
  Weights w(static_cast<std::size_t>(n), 0.0);
  const double c2 = c * c;
  w.front() = 1.0 / (1.0 + c2);
  w.back() = c2 / (1.0 + c2);
  return w;
}

Weights odd_limit(double c, double psi1, double psin, int n) {
  Weights w(static_cast<std::size_t>(n), 0.0);
  const double a = psi1 * psi1;
  const double b = c * c * psin * psin;
  w.front() = b / (a + b);
  w.back() = a / (a + b);
  return w;
}

CycleResult iterate_to_cycle(const Weights& q0, const SpectralModel& m, int max_k, double tol) {
  check_weights(q0, m);
  const int n = m.n();
  if (n < 2) throw AsymError("iterate_to_cycle: need n >= 2");
  if (!(q0.front() > 0.0) || !(q0.back() > 0.0)) {
    throw AsymError("iterate_to_cycle: q0 must be positive at the first and last index");
  }
  const double total = std::accumulate(q0.begin(), q0.end(), 0.0);
  Weights q = q0;
  for (double& x : q) x /= total;

  CycleResult res;
  std::vector<bool> hit(static_cast<std::size_t>(n), false);
  Weights two_back;
  Weights one_back;
  int streak = 0;
  int streak_start = 0;
  bool done = false;
  int k = 0;
  for (; k <= max_k; ++k) {
    res.theta.push_back(theta(q, m));
    if (k >= 2 && k % 2 == 0) {
      double r = 0.0;
      for (int i = 0; i < n; ++i) r = std::max(r, std::abs(q[i] - two_back[i]));
      res.residual = r;
      if (r < tol) {
        if (streak == 0) streak_start = k - 2;
        if (++streak >= 5) {
          done = true;
          break;
        }
      } else {
        streak = 0;
      }
    }
    const double g = gamma(q, m);
    for (int i = 1; i + 1 < n; ++i) {
      if (q[i] > 0.0 && m.lambda[i] - g == 0.0) hit[i] = true;
    }
    two_back = std::move(one_back);
    one_back = q;
    q = apply_T(q, m);
  }
  if (!done) {
    throw AsymError(
        fmt::format("iterate_to_cycle: no two-cycle within {} steps, residual {:.3g}", max_k, res.residual));
  }
  res.steps = k;
  res.k_converged = streak_start;
  res.even = q;
  res.odd = apply_T(q, m);
  for (int i = 1; i + 1 < n; ++i) {
    if (hit[i]) res.annihilated.push_back(i);
  }

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](int a, int b) { return q[a] > q[b]; });
  const int lo = std::min(idx[0], idx[1]);
  const int hi = std::max(idx[0], idx[1]);
  if (lo != 0 || hi != n - 1) {
    throw AsymError(fmt::format("iterate_to_cycle: limit supported on {{{}, {}}}, not on the extremes", lo + 1,
                                hi + 1));
  }
  res.cycle = two_cycle(0, n - 1, q.front() / (q.front() + q.back()), m);
  return res;
}

AlphaLimits predict_alpha_limits(double c, double psi1, double psin, double lambda1, double lambdan) {
  if (c == 0.0) throw AsymError("predict_alpha_limits: c must be nonzero");
  const double c2 = c * c;
  const double kappa = lambdan / lambda1;
  AlphaLimits a;
  a.even = (psi1 + c2 * psin) / (lambda1 * (psi1 + c2 * kappa * psin));
  a.odd = (psi1 + c2 * psin) / (lambda1 * (kappa * psi1 + c2 * psin));
  return a;
}

Rates predict_rates(double c, double kappa, double psi1, double psin) {
  if (c == 0.0) throw AsymError("predict_rates: c must be nonzero");
  if (!(kappa > 1.0)) throw AsymError("predict_rates: kappa must exceed 1");
  if (!(psi1 > 0.0) || !(psin > 0.0)) throw AsymError("predict_rates: Psi values must be positive");
  const double c2 = c * c;
  const double a = psi1;
  const double b = psin;
  const double k1 = sq(kappa - 1.0);
  Rates r;
  r.rf1 = c2 * k1 * (a * a + c2 * kappa * b * b) / (sq(a + c2 * kappa * b) * (c2 + kappa));
  r.rf2 = c2 * k1 * (c2 + kappa) * a * a * b * b / (sq(c2 * b + kappa * a) * (a * a + c2 * kappa * b * b));
  r.rg1 = c2 * k1 * (a * a + c2 * b * b) / ((1.0 + c2) * sq(a + c2 * kappa * b));
  r.rg2 = c2 * (1.0 + c2) * k1 * a * a * b * b / (sq(c2 * b + kappa * a) * (a * a + c2 * b * b));
  r.product = c2 * c2 * k1 * k1 * a * a * b * b / (sq(a + c2 * kappa * b) * sq(c2 * b + kappa * a));
  return r;
}

ObservedRates observed_rates(const IterateTrace& trace, int tail_pairs) {
  const auto& rec = trace.records;
  ObservedRates o;
  int last_even = static_cast<int>(rec.size()) - 3;
  if (last_even % 2 != 0) --last_even;
  for (int k = last_even; k >= 0 && o.pairs < tail_pairs; k -= 2) {
    const double f0 = rec[k].f_gap;
    const double f1 = rec[k + 1].f_gap;
    const double f2 = rec[k + 2].f_gap;
    const double g0 = sq(rec[k].gnorm);
    const double g1 = sq(rec[k + 1].gnorm);
    const double g2 = sq(rec[k + 2].gnorm);
    if (!(f0 > 0.0) || !(f1 > 0.0) || !(g0 > 0.0) || !(g1 > 0.0)) continue;
    o.rf1 += f1 / f0;
    o.rf2 += f2 / f1;
    o.rg1 += g1 / g0;
    o.rg2 += g2 / g1;
    ++o.pairs;
  }
  if (o.pairs == 0) throw AsymError("observed_rates: trace too short");
  o.rf1 /= o.pairs;
  o.rf2 /= o.pairs;
  o.rg1 /= o.pairs;
  o.rg2 /= o.pairs;
  return o;
}

double safe_ratio(double a, double b) {
  if (b == 0.0) throw AsymError("component vanished");
  if (a == 0.0) return 0.0;
  if (std::abs(a) < 1e-300 || std::abs(b) < 1e-300) {
    const double sign = (a < 0.0) != (b < 0.0) ? -1.0 : 1.0;
    return sign * std::exp(std::log(std::abs(a)) - std::log(std::abs(b)));
  }
  return a / b;
}

CEstimate estimate_c(const IterateTrace& trace, double psi1, double psin, int tail) {
  const auto& mu = trace.mu;
  if (mu.empty()) throw AsymError("estimate_c: trace has no eigencomponents");
  const int count = static_cast<int>(mu.size());
  const Eigen::Index n = mu.front().size();
  CEstimate e;
  double even_sum = 0.0;
  double odd_sum = 0.0;
  int even_n = 0;
  int odd_n = 0;
  int sign = 0;
  for (int k = count - 1; k >= 0 && (even_n < tail || odd_n < tail); --k) {
    if (k % 2 == 0 && even_n < tail) {
      const double r = safe_ratio(mu[k][n - 1], mu[k][0]);
      const int s = r > 0.0 ? 1 : (r < 0.0 ? -1 : 0);
      if (sign == 0) sign = s;
      if (s != sign) e.sign_stable = false;
      even_sum += r;
      ++even_n;
    } else if (k % 2 == 1 && odd_n < tail) {
      odd_sum += safe_ratio(mu[k][0], mu[k][n - 1]);
      ++odd_n;
    }
  }
  if (even_n < tail || odd_n < tail) {
    throw AsymError(fmt::format("estimate_c: need {} even and odd iterates, trace has {}", tail, count));
  }
  e.samples = tail;
  e.even = even_sum / even_n;
  e.odd = -psi1 / psin * odd_sum / odd_n;
  e.discrepancy = std::abs(e.even - e.odd) / std::abs(e.even);
  return e;
}

std::vector<int> interior_set(std::span<const double> spectrum, const Weights& q0, std::span<const double> alphas,
                              Exclusion rule) {
  const int n = static_cast<int>(spectrum.size());
  std::vector<int> out;
  for (int i = 1; i + 1 < n; ++i) {
    const double l = spectrum[i];
    if (!(l > spectrum.front() && l < spectrum.back())) continue;
    if (!(q0.at(static_cast<std::size_t>(i)) > 0.0)) continue;
    bool excluded = false;
    for (double a : alphas) {
      if (rule == Exclusion::vanishing_factor ? 1.0 - a * l == 0.0 : l == a) {
        excluded = true;
        break;
      }
    }
    if (!excluded) out.push_back(i);
  }
  return out;
}

CBound c_bound(std::span<const double> spectrum, double psi1, double psin, const std::vector<int>& interior) {
  if (interior.empty()) throw AsymError("no interior eigenvalues");
  const double l1 = spectrum.front();
  const double ln = spectrum.back();
  CBound b;
  b.sigma = INFINITY;
  for (int i : interior) b.sigma = std::min(b.sigma, std::abs(2.0 * spectrum[i] - (l1 + ln)) / (ln - l1));
  const double s2 = b.sigma * b.sigma;
  b.eta = 4.0 * (1.0 + s2) / (1.0 - s2);
  b.phi = (2.0 + b.eta + std::sqrt(b.eta * b.eta + 4.0 * b.eta)) / 2.0;
  const double base = psi1 / psin;
  b.lower = base / b.phi;
  b.upper = base * b.phi;
  return b;
}

}  // namespace zigzag::asym

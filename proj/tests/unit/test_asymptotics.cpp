#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "zigzag/asymptotics.hpp"

using namespace zigzag;
using namespace zigzag::asym;

namespace {

SpectralModel model(std::vector<double> lambda, const PsiFunction& psi) { return SpectralModel::make(lambda, psi); }

SpectralModel table_model(std::vector<double> lambda, std::vector<double> psi) {
  return SpectralModel::make(lambda, PsiFunction::table(lambda, psi));
}

Weights random_simplex(int n, Rng& rng) {
  Weights q(static_cast<std::size_t>(n));
  for (auto& x : q) x = rng.open_uniform(0.0, 1.0);
  const double s = std::accumulate(q.begin(), q.end(), 0.0);
  for (auto& x : q) x /= s;
  return q;
}

std::vector<double> random_spectrum(int n, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.open_uniform(1.0, 100.0);
  std::sort(v.begin(), v.end());
  return v;
}

// Direct formula for (Tp)_i.
Weights t_oracle(const Weights& p, const std::vector<double>& lambda, const std::vector<double>& psi) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    num += psi[i] * lambda[i] * p[i];
    den += psi[i] * p[i];
  }
  const double g = num / den;
  Weights out(p.size());
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = (lambda[i] - g) * (lambda[i] - g) * p[i];
    s += out[i];
  }
  for (auto& x : out) x /= s;
  return out;
}

double max_diff(const Weights& a, const Weights& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("gamma examples") {
  const auto one = model({1, 3}, PsiFunction::constant());
  CHECK(gamma({0.5, 0.5}, one) == doctest::Approx(2.0));
  CHECK(gamma({1.0, 0.0}, one) == 1.0);
  CHECK(gamma({0.0, 1.0}, one) == 3.0);
  const auto lin = model({1, 3}, PsiFunction::monomial(1));
  CHECK(gamma({0.5, 0.5}, lin) == doctest::Approx(2.5));
  CHECK_THROWS_AS(gamma({0.0, 0.0}, one), AsymError);
}

TEST_CASE("theta examples and loop oracle") {
  const auto one = model({1, 3}, PsiFunction::constant());
  CHECK(theta({0.5, 0.5}, one) == doctest::Approx(1.0));
  CHECK(theta({0.0, 1.0}, one) == 0.0);

  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 15);
    const auto lambda = random_spectrum(n, rng);
    std::vector<double> psi(static_cast<std::size_t>(n));
    for (auto& x : psi) x = rng.open_uniform(0.1, 10.0);
    const auto m = table_model(lambda, psi);
    const auto p = random_simplex(n, rng);
    const double th = theta(p, m);
    CHECK(th == doctest::Approx(oracle::weighted_variance(lambda, psi, p)).epsilon(1e-12));
    CHECK(th >= 0.0);
    CHECK(th <= (lambda.back() - lambda.front()) * (lambda.back() - lambda.front()));
    const double g = gamma(p, m);
    CHECK(g > lambda.front());
    CHECK(g < lambda.back());
  }
}

TEST_CASE("apply_T examples") {
  const auto one = model({1, 3}, PsiFunction::constant());
  const Weights p{0.9, 0.1};
  const auto tp = apply_T(p, one);
  const auto want = t_oracle(p, {1, 3}, {1, 1});
  CHECK(max_diff(tp, want) <= 1e-14);
  CHECK_THROWS_WITH_AS(apply_T({1.0, 0.0}, one), "T undefined: gradient would vanish", AsymError);
}

TEST_CASE("apply_T preserves the simplex and never decreases theta") {
  Rng rng(22);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 10);
    const auto lambda = random_spectrum(n, rng);
    const int u = static_cast<int>(rng.next() % 3);
    const auto m = model(lambda, PsiFunction::monomial(u));
    auto p = random_simplex(n, rng);
    for (int k = 0; k < 30; ++k) {
      const auto tp = apply_T(p, m);
      const double s = std::accumulate(tp.begin(), tp.end(), 0.0);
      CHECK(std::abs(s - 1.0) <= 1e-12);
      for (double x : tp) CHECK(x >= 0.0);
      CHECK(max_diff(tp, t_oracle(p, m.lambda, m.psi)) <= 1e-12);
      CHECK(theta(tp, m) >= theta(p, m) - 1e-10 * theta(p, m));
      p = tp;
    }
  }
}

TEST_CASE("weights_from normalizes squared components") {
  const auto q = weights_from((Vector(3) << 1, -2, 2).finished());
  CHECK(q[0] == doctest::Approx(1.0 / 9.0));
  CHECK(q[1] == doctest::Approx(4.0 / 9.0));
  CHECK(q[2] == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("two-cycle fixed points") {
  const auto one = model({1, 3}, PsiFunction::constant());
  auto fp = two_cycle_fixed_point(0, 1, one);
  CHECK(fp.p_star[0] == doctest::Approx(0.5));
  CHECK(fp.p_star[1] == doctest::Approx(0.5));

  const auto lin = model({1, 3}, PsiFunction::monomial(1));
  fp = two_cycle_fixed_point(0, 1, lin);
  CHECK(fp.p_star[0] == doctest::Approx(0.75));
  CHECK(fp.p_star[1] == doctest::Approx(0.25));
  CHECK(max_diff(apply_T(fp.p_star, lin), fp.p_star) <= 1e-14);

  const auto dup = model({1, 1, 3}, PsiFunction::constant());
  CHECK_THROWS_AS(two_cycle_fixed_point(0, 1, dup), AsymError);
}

TEST_CASE("two-point states: T^2 p = p and gamma identities for random Psi tables") {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng.next() % 8);
    const auto lambda = random_spectrum(n, rng);
    std::vector<double> psi(static_cast<std::size_t>(n));
    for (auto& x : psi) x = rng.open_uniform(0.1, 10.0);
    const auto m = table_model(lambda, psi);
    const int i1 = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1));
    const int i2 = i1 + 1 + static_cast<int>(rng.next() % static_cast<std::uint64_t>(n - 1 - i1));
    const auto c = two_cycle(i1, i2, rng.open_uniform(0.01, 0.99), m);
    CHECK(c.p_star[static_cast<std::size_t>(i1)] + c.p_star[static_cast<std::size_t>(i2)] == doctest::Approx(1.0));
    CHECK(max_diff(apply_T(c.p_star, m), c.tp_star) <= 1e-12);
    CHECK(max_diff(apply_T(c.tp_star, m), c.p_star) <= 1e-12);
    CHECK(c.gamma_p + c.gamma_tp == doctest::Approx(lambda[static_cast<std::size_t>(i1)] +
                                                    lambda[static_cast<std::size_t>(i2)]).epsilon(1e-12));
    const auto fp = two_cycle_fixed_point(i1, i2, m);
    CHECK(max_diff(apply_T(apply_T(fp.p_star, m), m), fp.p_star) <= 1e-12);
    CHECK(max_diff(fp.tp_star, fp.p_star) <= 1e-12);
  }
}

TEST_CASE("iterate_to_cycle: a fixed point converges immediately") {
  const auto m = model({1, 2, 4}, PsiFunction::constant());
  const auto r = iterate_to_cycle({0.5, 0.0, 0.5}, m);
  CHECK(r.k_converged == 0);
  CHECK(r.cycle.i1 == 0);
  CHECK(r.cycle.i2 == 2);
  CHECK(std::abs(r.cycle.c) == doctest::Approx(1.0));
}

TEST_CASE("iterate_to_cycle: interior weight vanishes") {
  const auto m = model({1, 2, 3}, PsiFunction::constant());
  const auto r = iterate_to_cycle({1.0 / 3, 1.0 / 3, 1.0 / 3}, m);
  CHECK(r.even[1] <= 1e-12);
  CHECK(r.odd[1] <= 1e-12);
}

TEST_CASE("iterate_to_cycle: limits match the closed forms at n = 5") {
  Rng rng(24);
  for (int u = 0; u <= 2; ++u) {
    const auto lambda = std::vector<double>{1.0, 2.2, 4.1, 7.3, 11.0};
    const auto m = model(lambda, PsiFunction::monomial(u));
    const auto r = iterate_to_cycle(random_simplex(5, rng), m, 10000, 1e-14);
    const double c = r.cycle.c;
    CHECK(max_diff(r.even, even_limit(c, 5)) <= 1e-8);
    CHECK(max_diff(r.odd, odd_limit(c, m.psi1(), m.psin(), 5)) <= 1e-8);
    for (std::size_t k = 0; k + 1 < r.theta.size(); ++k) CHECK(r.theta[k + 1] >= r.theta[k] * (1 - 1e-10));
  }
}

TEST_CASE("iterate_to_cycle rejects a start without both extreme components") {
  const auto m = model({1, 2, 3}, PsiFunction::constant());
  CHECK_THROWS_AS(iterate_to_cycle({0.0, 0.5, 0.5}, m), AsymError);
  CHECK_THROWS_AS(iterate_to_cycle({0.3, 0.3, 0.4}, m, 3), AsymError);
}

TEST_CASE("alpha limits") {
  const auto a = predict_alpha_limits(1.0, 1.0, 1.0, 1.0, 9.0);
  CHECK(a.even == doctest::Approx(0.2));
  CHECK(a.odd == doctest::Approx(0.2));

  Rng rng(25);
  for (int t = 0; t < 200; ++t) {
    const double l1 = rng.open_uniform(0.1, 10);
    const double ln = l1 * rng.open_uniform(1.01, 1e4);
    const double c = std::exp(rng.uniform(-5, 5));
    const double p1 = rng.open_uniform(0.01, 100);
    const double pn = rng.open_uniform(0.01, 100);
    const auto lim = predict_alpha_limits(c, p1, pn, l1, ln);
    CHECK(1.0 / lim.even + 1.0 / lim.odd == doctest::Approx(l1 + ln).epsilon(1e-12));
    CHECK(lim.even > 1.0 / ln);
    CHECK(lim.even < 1.0 / l1);
    CHECK(lim.odd > 1.0 / ln);
    CHECK(lim.odd < 1.0 / l1);
  }
  CHECK(predict_alpha_limits(1e8, 1, 1, 1, 100).even == doctest::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("rate predictions") {
  Rng rng(26);
  for (int t = 0; t < 200; ++t) {
    const double kappa = rng.uniform(2, 1e4);
    const double c = std::exp(rng.uniform(-3, 3));
    const double p1 = rng.open_uniform(0.01, 100);
    const double pn = rng.open_uniform(0.01, 100);
    const auto r = predict_rates(c, kappa, p1, pn);
    for (double x : {r.rf1, r.rf2, r.rg1, r.rg2}) CHECK(x > 0.0);
    CHECK(r.product < 1.0);
    CHECK(r.rf1 * r.rf2 == doctest::Approx(r.product).epsilon(1e-12));
    CHECK(r.rg1 * r.rg2 == doctest::Approx(r.product).epsilon(1e-12));
    CHECK(r.product <= std::pow((kappa - 1) / (kappa + 1), 4) + 1e-12);

    const auto sd_like = predict_rates(c, kappa, p1, p1);
    CHECK(sd_like.rf1 == doctest::Approx(sd_like.rf2).epsilon(1e-12));
    CHECK(sd_like.rf1 < 1.0);
    const auto mg_like = predict_rates(c, kappa, p1, kappa * p1);
    CHECK(mg_like.rg1 == doctest::Approx(mg_like.rg2).epsilon(1e-12));
    for (double x : {mg_like.rf1, mg_like.rf2, mg_like.rg1, mg_like.rg2}) CHECK(x < 1.0);
    const auto tight = predict_rates(std::sqrt(p1 / pn), kappa, p1, pn);
    CHECK(tight.product == doctest::Approx(std::pow((kappa - 1) / (kappa + 1), 4)).epsilon(1e-12));
  }
}

TEST_CASE("estimate_c recovers an injected two-cycle") {
  for (double c : {0.3, -2.0, 17.0}) {
    const double psi1 = 1.0, psin = 10.0;
    IterateTrace t;
    double s = 1.0;
    for (int k = 0; k < 60; ++k) {
      Vector mu = Vector::Zero(4);
      if (k % 2 == 0) {
        mu[0] = s;
        mu[3] = c * s;
      } else {
        mu[0] = -c * psin / psi1 * s;
        mu[3] = s;
      }
      t.mu.push_back(mu);
      s *= 0.5;
    }
    const auto e = estimate_c(t, psi1, psin, 20);
    CHECK(e.even == doctest::Approx(c).epsilon(1e-10));
    CHECK(e.odd == doctest::Approx(c).epsilon(1e-10));
    CHECK(e.discrepancy <= 1e-10);
    CHECK(e.sign_stable);
  }
  IterateTrace short_trace;
  short_trace.mu.assign(10, Vector::Ones(3));
  CHECK_THROWS_AS(estimate_c(short_trace, 1, 1, 20), AsymError);
}

TEST_CASE("safe_ratio below the underflow threshold") {
  CHECK(safe_ratio(3e-305, 1e-305) == doctest::Approx(3.0));
  CHECK(safe_ratio(-3e-310, 1e-310) == doctest::Approx(-3.0).epsilon(1e-5));
  CHECK(safe_ratio(0.0, 1.0) == 0.0);
  CHECK_THROWS_WITH_AS(safe_ratio(1.0, 0.0), "component vanished", AsymError);
}

TEST_CASE("observed rates on a geometric trace") {
  IterateTrace t;
  double f = 1.0, g = 1.0;
  for (int k = 0; k < 40; ++k) {
    t.records.push_back({k, f, g, 0.1, "x"});
    f *= k % 2 == 0 ? 0.5 : 0.8;
    g *= k % 2 == 0 ? std::sqrt(0.6) : std::sqrt(0.7);
  }
  const auto o = observed_rates(t, 10);
  CHECK(o.pairs == 10);
  CHECK(o.rf1 == doctest::Approx(0.5));
  CHECK(o.rf2 == doctest::Approx(0.8));
  CHECK(o.rg1 == doctest::Approx(0.6));
  CHECK(o.rg2 == doctest::Approx(0.7));
}

TEST_CASE("c_bound for spectrum (1, 2.5, 3)") {
  const std::vector<double> s{1, 2.5, 3};
  const auto b = c_bound(s, 1.0, 1.0, {1});
  CHECK(b.sigma == doctest::Approx(0.5));
  CHECK(b.eta == doctest::Approx(20.0 / 3.0));
  // phi is the root > 1 of phi + 1/phi = 2 + eta
  CHECK(b.phi + 1.0 / b.phi == doctest::Approx(2.0 + 20.0 / 3.0).epsilon(1e-14));
  CHECK(b.phi > 1.0);
  CHECK(b.lower == doctest::Approx(1.0 / b.phi));
  CHECK(b.upper == doctest::Approx(b.phi));
  const auto scaled = c_bound(s, 2.0, 8.0, {1});
  CHECK(scaled.lower == doctest::Approx(0.25 / b.phi));
  CHECK(scaled.upper == doctest::Approx(0.25 * b.phi));

  CHECK_THROWS_WITH_AS(c_bound(s, 1.0, 1.0, {}), "no interior eigenvalues", AsymError);
  const auto edge = c_bound(std::vector<double>{1, 2.999999, 3}, 1, 1, {1});
  CHECK(edge.phi > 1e5);
}

TEST_CASE("interior_set exclusion rules") {
  const std::vector<double> s{1, 2, 4, 5};
  const Weights q{0.25, 0.25, 0.25, 0.25};
  CHECK(interior_set(s, q, std::vector<double>{0.3}) == std::vector<int>{1, 2});
  CHECK(interior_set(s, q, std::vector<double>{0.5}) == std::vector<int>{2});
  CHECK(interior_set(s, q, std::vector<double>{0.5}, Exclusion::literal) == std::vector<int>{1, 2});
  CHECK(interior_set(s, q, std::vector<double>{4.0}, Exclusion::literal) == std::vector<int>{1});
  CHECK(interior_set(s, {0.5, 0.0, 0.0, 0.5}, std::vector<double>{}).empty());
}

TEST_CASE("observed c lies within the bound for random spectra") {
  Rng rng(27);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + static_cast<int>(rng.next() % 8);
    const auto lambda = random_spectrum(n, rng);
    const int u = t % 3;
    const auto m = model(lambda, PsiFunction::monomial(u));
    const auto q0 = random_simplex(n, rng);
    CycleResult r;
    try {
      r = iterate_to_cycle(q0, m);
    } catch (const AsymError&) {
      continue;
    }
    std::vector<int> interior;
    for (int i = 1; i + 1 < n; ++i) {
      if (std::find(r.annihilated.begin(), r.annihilated.end(), i) == r.annihilated.end()) interior.push_back(i);
    }
    if (interior.empty()) continue;
    const auto b = c_bound(lambda, m.psi1(), m.psin(), interior);
    const double c2 = r.cycle.c * r.cycle.c;
    CHECK(c2 >= b.lower * (1 - 1e-9));
    CHECK(c2 <= b.upper * (1 + 1e-9));
    ++checked;
  }
  CHECK(checked >= 90);
}

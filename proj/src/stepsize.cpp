#include "zigzag/stepsize.hpp"

#include <cmath>

#include <fmt/format.h>

namespace zigzag::step {
namespace {

bool is_nonneg_integer(double x) { return x >= 0.0 && std::abs(x - std::round(x)) <= 1e-12; }

// Sum_i F(lambda_i) y_i^2 over eigencomponents y.
double weighted(std::span<const double> lambda, const Vector& y, const std::vector<double>& f, bool times_lambda) {
  double s = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double yi = y[static_cast<Eigen::Index>(i)];
    s += f[i] * (times_lambda ? lambda[i] : 1.0) * yi * yi;
  }
  return s;
}

double two_over(double a_prev, double a_cur, double coupling) {
  const double ip = 1.0 / a_prev;
  const double ic = 1.0 / a_cur;
  const double d = ip - ic;
  return 2.0 / (ip + ic + std::sqrt(d * d + coupling));
}

}  // namespace

GradientMoments compute_moments(const QuadraticProblem& problem, const Vector& g, const Vector& Ag, int order) {
  if (order < 2) order = 2;
  const int top = (order + 1) / 2;  // need A^j g for j = 0..top
  std::vector<Vector> v;
  v.reserve(static_cast<std::size_t>(top) + 1);
  v.push_back(g);
  v.push_back(Ag);
  for (int j = 2; j <= top; ++j) v.push_back(problem.apply(v.back()));

  GradientMoments out;
  out.m.resize(static_cast<std::size_t>(order) + 1);
  for (int j = 0; j <= order; ++j) {
    const int a = j / 2;
    const int b = j - a;
    out.m[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(a)].dot(v[static_cast<std::size_t>(b)]);
  }
  return out;
}

double family(const GradientMoments& m, int u) {
  if (u < 0) throw StepError("family: exponent u must be >= 0");
  if (m.order() < u + 1) throw StepError(fmt::format("family: moments of order {} required", u + 1));
  if (m.gg() == 0.0) throw ZeroGradient();
  return m[u] / m[u + 1];
}

double aopt(const GradientMoments& m) {
  if (m.gg() == 0.0) throw ZeroGradient();
  return std::sqrt(m.gg() / m.gA2g());
}

double bb1(const Secant& sec) {
  if (!(sec.sy > 0.0)) throw StepError("bb1: s'y must be positive");
  return sec.ss / sec.sy;
}

double bb2(const Secant& sec) {
  if (!(sec.sy > 0.0)) throw StepError("bb2: s'y must be positive");
  return sec.sy / sec.yy;
}

double bb1(const Vector& s, const Vector& y) { return bb1(Secant::from(s, y)); }
double bb2(const Vector& s, const Vector& y) { return bb2(Secant::from(s, y)); }

double bb1(const StepState& state) {
  if (!state.secant) throw StepError("BB needs one prior step");
  return bb1(*state.secant);
}

double bb2(const StepState& state) {
  if (!state.secant) throw StepError("BB needs one prior step");
  return bb2(*state.secant);
}

double yuan(double sd_prev, double sd_cur, double gg_prev, double gg_cur) {
  if (!(sd_prev > 0.0) || !(sd_cur > 0.0) || !(gg_prev > 0.0)) {
    throw StepError("yuan: needs positive SD stepsizes and a nonzero previous gradient");
  }
  return two_over(sd_prev, sd_cur, 4.0 * gg_cur / (sd_prev * sd_prev * gg_prev));
}

double yuan(const StepState& state) {
  if (!state.prev) throw StepError("yuan: needs the previous iteration");
  const GradientMoments& p = state.prev->moments;
  return yuan(sd(p), sd(state.moments), p.gg(), state.moments.gg());
}

double tilde_mg(double mg_prev, double mg_cur, double gAg_prev, double gAg_cur) {
  if (!(mg_prev > 0.0) || !(mg_cur > 0.0) || !(gAg_prev > 0.0)) {
    throw StepError("tilde_mg: needs positive MG stepsizes and previous g'Ag");
  }
  return two_over(mg_prev, mg_cur, 4.0 * gAg_cur / (mg_prev * mg_prev * gAg_prev));
}

double tilde_mg(const StepState& state) {
  if (!state.prev) throw StepError("tilde_mg: needs the previous iteration");
  const GradientMoments& p = state.prev->moments;
  return tilde_mg(mg(p), mg(state.moments), p.gAg(), state.moments.gAg());
}

TildeRoots tilde_roots(const Sym2& h) {
  const double tr = h.h11 + h.h22;
  double det = h.h11 * h.h22 - h.h12 * h.h12;
  if (!(h.h11 > 0.0) || !(h.h22 > 0.0) || det < -1e-14 * tr * tr || !std::isfinite(det)) {
    throw StepError(fmt::format("tilde: H=[[{}, {}], [{}, {}]] is not SPD", h.h11, h.h12, h.h12, h.h22));
  }
  if (det < 0.0) det = 0.0;
  const double d = h.h11 - h.h22;
  const double root = std::sqrt(d * d + 4.0 * h.h12 * h.h12);
  TildeRoots out;
  out.small = 2.0 / (tr + root);
  // tr - root = 4 det / (tr + root); avoids cancellation for the large root
  out.large = det > 0.0 ? (tr + root) / (2.0 * det) : std::numeric_limits<double>::infinity();
  return out;
}

Sym2 family_H(const GradientMoments& prev, const GradientMoments& cur, int u) {
  const double a_prev = family(prev, u);
  const double a_cur = family(cur, u);
  const double mp = prev[u];
  const double mc = cur[u];
  return {1.0 / a_prev, -mc / (a_prev * std::sqrt(mp * mc)), 1.0 / a_cur};
}

Sym2 build_H(const QuadraticProblem& problem, const Vector& g_prev, const Vector& g_cur, double alpha_prev,
             const PsiFunction& psi, double r) {
  if (!(alpha_prev > 0.0)) throw StepError("build_H: previous stepsize must be positive");
  if (g_prev.squaredNorm() == 0.0 || g_cur.squaredNorm() == 0.0) throw ZeroGradient();

  double s_prev_2r = 0.0;      // g_{k-1}' Psi^{2r} g_{k-1}
  double s_prev_2r_a = 0.0;    // g_{k-1}' Psi^{2r} A g_{k-1}
  double s_cur_2r1 = 0.0;      // g_k' Psi^{2(1-r)} g_k
  double s_cur_2r1_a = 0.0;    // g_k' Psi^{2(1-r)} A g_k
  double s_cur_psi = 0.0;      // g_k' Psi g_k

  if (problem.is_diagonal()) {
    const auto lambda = problem.spectrum();
    const auto f1 = psi.pow(2.0 * r).on(lambda);
    const auto f2 = psi.pow(2.0 * (1.0 - r)).on(lambda);
    const auto f0 = psi.on(lambda);
    s_prev_2r = weighted(lambda, g_prev, f1, false);
    s_prev_2r_a = weighted(lambda, g_prev, f1, true);
    s_cur_2r1 = weighted(lambda, g_cur, f2, false);
    s_cur_2r1_a = weighted(lambda, g_cur, f2, true);
    s_cur_psi = weighted(lambda, g_cur, f0, false);
  } else {
    const auto u = psi.exponent();
    if (!u || !is_nonneg_integer(*u) || !is_nonneg_integer(2.0 * r * *u) ||
        !is_nonneg_integer(2.0 * (1.0 - r) * *u)) {
      throw StepError(
          "build_H: fractional Psi powers are not representable on a rotated problem; use step::yuan (Psi = I) "
          "or step::tilde_mg (Psi = A, r = 1/2)");
    }
    const int p1 = static_cast<int>(std::lround(2.0 * r * *u));
    const int p2 = static_cast<int>(std::lround(2.0 * (1.0 - r) * *u));
    const int pu = static_cast<int>(std::lround(*u));
    const auto mp = compute_moments(problem, g_prev, problem.apply(g_prev), p1 + 1);
    const auto mc = compute_moments(problem, g_cur, problem.apply(g_cur), std::max(p2 + 1, pu));
    s_prev_2r = mp[p1];
    s_prev_2r_a = mp[p1 + 1];
    s_cur_2r1 = mc[p2];
    s_cur_2r1_a = mc[p2 + 1];
    s_cur_psi = mc[pu];
  }

  Sym2 h;
  h.h11 = s_prev_2r_a / s_prev_2r;
  h.h22 = s_cur_2r1_a / s_cur_2r1;
  h.h12 = -s_cur_psi / (alpha_prev * std::sqrt(s_prev_2r) * std::sqrt(s_cur_2r1));
  return h;
}

double hat(double alpha_even, double alpha_odd) {
  if (!(alpha_even > 0.0) || !(alpha_odd > 0.0)) throw StepError("hat: stepsizes must be positive");
  return 1.0 / (1.0 / alpha_even + 1.0 / alpha_odd);
}

}  // namespace zigzag::step

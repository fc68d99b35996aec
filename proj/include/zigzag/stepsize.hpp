#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zigzag/psi.hpp"
#include "zigzag/quadratic_model.hpp"

namespace zigzag::step {

class StepError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised in place of a stepsize when the gradient is exactly zero.
class ZeroGradient : public StepError {
 public:
  ZeroGradient() : StepError("zero gradient: iterate is optimal, no stepsize") {}
};

/// Inner products m[j] = g'A^j g for j = 0..order.
struct GradientMoments {
  std::vector<double> m;

  double operator[](int j) const { return m.at(static_cast<std::size_t>(j)); }
  int order() const { return static_cast<int>(m.size()) - 1; }
  double gg() const { return (*this)[0]; }
  double gAg() const { return (*this)[1]; }
  double gA2g() const { return (*this)[2]; }
};

/// Moments up to `order` (>= 2). `Ag` is the already-available product A g;
/// orders beyond 2 cost one extra matvec per two orders.
GradientMoments compute_moments(const QuadraticProblem& problem, const Vector& g, const Vector& Ag, int order);

/// Secant pair products for s = x_k - x_{k-1}, y = g_k - g_{k-1}.
struct Secant {
  double ss = 0.0;
  double sy = 0.0;
  double yy = 0.0;

  static Secant from(const Vector& s, const Vector& y) { return {s.dot(s), s.dot(y), y.dot(y)}; }
};

/// Everything a stepsize rule may read at iteration k.
struct StepState {
  struct Snapshot {
    GradientMoments moments;
    double alpha = 0.0;  // stepsize actually taken at k-1
  };

  GradientMoments moments;
  std::optional<Snapshot> prev;
  std::optional<Secant> secant;
};

/// g'A^u g / g'A^{u+1} g. Throws ZeroGradient when g = 0.
double family(const GradientMoments& m, int u);
inline double sd(const GradientMoments& m) { return family(m, 0); }
inline double mg(const GradientMoments& m) { return family(m, 1); }

/// ||g|| / ||Ag||. Diagnostic only; not a member of the family.
double aopt(const GradientMoments& m);

double bb1(const Secant& sec);
double bb2(const Secant& sec);
double bb1(const Vector& s, const Vector& y);
double bb2(const Vector& s, const Vector& y);
/// From state.secant; throws StepError "BB needs one prior step" without it.
double bb1(const StepState& state);
double bb2(const StepState& state);

/// Yuan's stepsize from consecutive SD stepsizes and squared gradient norms.
double yuan(double sd_prev, double sd_cur, double gg_prev, double gg_cur);
double yuan(const StepState& state);

/// Short stepsize for Psi = A with r = 1/2, from consecutive MG stepsizes and
/// the g'Ag values that produced them.
double tilde_mg(double mg_prev, double mg_cur, double gAg_prev, double gAg_cur);
double tilde_mg(const StepState& state);

/// Symmetric 2x2 matrix.
struct Sym2 {
  double h11 = 0.0;
  double h12 = 0.0;
  double h22 = 0.0;
};

struct TildeRoots {
  double small = 0.0;  // 2 / (tr + sqrt(disc)), reciprocal of the larger eigenvalue of H
  double large = 0.0;  // 2 / (tr - sqrt(disc))
};

/// Reciprocal eigenvalues of an SPD 2x2 matrix, computed in the cancellation
/// free form 2 / (tr +- sqrt((h11 - h22)^2 + 4 h12^2)). Throws StepError when
/// H is not SPD.
TildeRoots tilde_roots(const Sym2& h);

/// H^k for the monomial Psi = A^u and r = 1/2, built from moments alone:
/// H11 = 1/alpha_{k-1}, H22 = 1/alpha_k, H12 = -m_u(k) / (alpha_{k-1} sqrt(m_u(k-1) m_u(k))).
/// u = 0 reproduces Yuan's quantities, u = 1 the Psi = A closed form.
Sym2 family_H(const GradientMoments& prev, const GradientMoments& cur, int u);

/// General H^k for any Psi and exponent split r, with alpha_prev the family
/// stepsize used at k-1. Diagonal problems accept any Psi; rotated problems
/// need Psi = A^u with 2ru and 2(1-r)u nonnegative integers, otherwise a
/// StepError names the closed forms (yuan / tilde_mg) to use instead.
Sym2 build_H(const QuadraticProblem& problem, const Vector& g_prev, const Vector& g_cur, double alpha_prev,
             const PsiFunction& psi, double r);

/// (1/a + 1/b)^{-1}.
double hat(double alpha_even, double alpha_odd);

}  // namespace zigzag::step

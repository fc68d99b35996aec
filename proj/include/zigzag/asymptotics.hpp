#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "zigzag/psi.hpp"
#include "zigzag/solver.hpp"

namespace zigzag::asym {

class AsymError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Point on the probability simplex: normalized squared eigencomponents.
using Weights = std::vector<double>;

/// Spectrum with Psi evaluated on it.
struct SpectralModel {
  std::vector<double> lambda;
  std::vector<double> psi;

  static SpectralModel make(std::span<const double> spectrum, const PsiFunction& psi);
  int n() const { return static_cast<int>(lambda.size()); }
  double psi1() const { return psi.front(); }
  double psin() const { return psi.back(); }
  double kappa() const { return lambda.back() / lambda.front(); }
};

/// q_i = mu_i^2 / ||mu||^2.
Weights weights_from(const Vector& mu);

/// sum Psi lambda p / sum Psi p.
double gamma(const Weights& p, const SpectralModel& m);
/// Psi-weighted variance of the spectrum about gamma(p).
double theta(const Weights& p, const SpectralModel& m);
/// (Tp)_i proportional to (lambda_i - gamma(p))^2 p_i. Throws AsymError when
/// every component would vanish.
Weights apply_T(const Weights& p, const SpectralModel& m);

/// Two-point state p on {i1, i2} (0-based) and its image Tp.
struct TwoCycle {
  int i1 = 0;
  int i2 = 0;
  Weights p_star;
  Weights tp_star;
  double c = 0.0;  // sqrt(p_star[i2] / p_star[i1])
  double gamma_p = 0.0;
  double gamma_tp = 0.0;
};

/// Two-point state with weight `p_i1` on i1 and its closed-form image.
TwoCycle two_cycle(int i1, int i2, double p_i1, const SpectralModel& m);
/// The fixed point p* = Tp*: p*_{i1} = Psi(i2) / (Psi(i1) + Psi(i2)).
TwoCycle two_cycle_fixed_point(int i1, int i2, const SpectralModel& m);

/// Limiting weights (1/(1+c^2), 0, ..., c^2/(1+c^2)).
Weights even_limit(double c, int n);
/// Limiting weights on the odd subsequence.
Weights odd_limit(double c, double psi1, double psin, int n);

struct CycleResult {
  TwoCycle cycle;         // closed-form cycle through the observed even limit
  Weights even;           // observed even-subsequence limit
  Weights odd;            // observed odd-subsequence limit
  int k_converged = 0;    // start of the converged streak
  int steps = 0;          // T applications performed
  double residual = 0.0;  // last ||q_{2k+2} - q_{2k}||_inf
  std::vector<double> theta;        // Theta(q_k) along the orbit
  std::vector<int> annihilated;     // interior indices with lambda_i == gamma(q_k) at some k
};

/// Iterates T from q0 until ||q_{2k+2} - q_{2k}||_inf < tol for 5
/// consecutive even steps. Requires q0 positive at both extreme indices and
/// throws AsymError on non-convergence or when the limit is not supported on
/// {1, n}.
CycleResult iterate_to_cycle(const Weights& q0, const SpectralModel& m, int max_k = 1000000, double tol = 1e-12);

struct AlphaLimits {
  double even = 0.0;
  double odd = 0.0;
};

AlphaLimits predict_alpha_limits(double c, double psi1, double psin, double lambda1, double lambdan);

struct Rates {
  double rf1 = 0.0;
  double rf2 = 0.0;
  double rg1 = 0.0;
  double rg2 = 0.0;
  double product = 0.0;  // closed form of rf1 * rf2 = rg1 * rg2
};

Rates predict_rates(double c, double kappa, double psi1, double psin);

struct ObservedRates {
  double rf1 = 0.0;  // mean of f_gap(2k+1) / f_gap(2k)
  double rf2 = 0.0;  // mean of f_gap(2k+2) / f_gap(2k+1)
  double rg1 = 0.0;  // same for ||g||^2
  double rg2 = 0.0;
  int pairs = 0;
};

/// Averages over the last `tail_pairs` complete (2k, 2k+1, 2k+2) triples.
ObservedRates observed_rates(const IterateTrace& trace, int tail_pairs);

struct CEstimate {
  double even = 0.0;  // mean mu_{2k}^(n) / mu_{2k}^(1)
  double odd = 0.0;   // -Psi1/Psin * mean mu_{2k+1}^(1) / mu_{2k+1}^(n)
  double discrepancy = 0.0;
  bool sign_stable = true;
  int samples = 0;
};

/// c from the last `tail` even and odd iterates of a trace with mu captured.
CEstimate estimate_c(const IterateTrace& trace, double psi1, double psin, int tail = 20);

/// Ratio a / b that survives |a|, |b| below 1e-300.
double safe_ratio(double a, double b);

enum class Exclusion { vanishing_factor, literal };

/// Interior indices i (lambda_1 < lambda_i < lambda_n, q0_i > 0) not excluded
/// by the stepsizes: `vanishing_factor` drops i if 1 - alpha_k lambda_i == 0
/// for some k, `literal` if lambda_i == alpha_k.
std::vector<int> interior_set(std::span<const double> spectrum, const Weights& q0, std::span<const double> alphas,
                              Exclusion rule = Exclusion::vanishing_factor);

struct CBound {
  double lower = 0.0;
  double upper = 0.0;
  double sigma = 0.0;
  double eta = 0.0;
  double phi = 0.0;
};

/// Bounds on c^2 from the minimum deviation over `interior`. Throws
/// AsymError "no interior eigenvalues" when `interior` is empty.
CBound c_bound(std::span<const double> spectrum, double psi1, double psin, const std::vector<int>& interior);

}  // namespace zigzag::asym

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zigzag {

/// Positive weight function Psi applied to the Hessian spectrum. The family
/// stepsize is g'Psi(A)g / g'Psi(A)Ag; Psi = 1 gives steepest descent and
/// Psi(lambda) = lambda gives minimal gradient.
///
/// Only values on the (finite, known) spectrum are ever needed, so a Psi is
/// either a monomial lambda^u, a positive constant, or an explicit table of
/// (lambda_i, Psi(lambda_i)) pairs.
class PsiFunction {
 public:
  static PsiFunction monomial(double u);
  static PsiFunction constant(double value = 1.0);
  static PsiFunction table(std::vector<double> lambdas, std::vector<double> values);

  /// Throws std::domain_error when a table has no entry for `lambda` or the
  /// result is not positive and finite.
  double operator()(double lambda) const;

  std::vector<double> on(std::span<const double> spectrum) const;

  /// Psi^r, pointwise.
  PsiFunction pow(double r) const;

  /// Exponent u when Psi(lambda) = lambda^u (a constant 1 reports u = 0).
  std::optional<double> exponent() const;

  std::string describe() const;

 private:
  enum class Kind { monomial, constant, table };
  Kind kind_ = Kind::constant;
  double param_ = 1.0;  // exponent or constant value
  std::vector<double> lambdas_;
  std::vector<double> values_;
};

}  // namespace zigzag

#include "zigzag/psi.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace zigzag {

PsiFunction PsiFunction::monomial(double u) {
  if (!std::isfinite(u)) throw std::invalid_argument("psi: monomial exponent must be finite");
  PsiFunction p;
  p.kind_ = Kind::monomial;
  p.param_ = u;
  return p;
}

PsiFunction PsiFunction::constant(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("psi: constant must be positive and finite");
  }
  PsiFunction p;
  p.kind_ = Kind::constant;
  p.param_ = value;
  return p;
}

PsiFunction PsiFunction::table(std::vector<double> lambdas, std::vector<double> values) {
  if (lambdas.size() != values.size() || lambdas.empty()) {
    throw std::invalid_argument("psi: table needs matching nonempty lambda/value lists");
  }
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("psi: table values must be positive and finite");
    }
  }
  PsiFunction p;
  p.kind_ = Kind::table;
  p.lambdas_ = std::move(lambdas);
  p.values_ = std::move(values);
  return p;
}

double PsiFunction::operator()(double lambda) const {
  double v = 0.0;
  switch (kind_) {
    case Kind::constant:
      v = param_;
      break;
    case Kind::monomial:
      v = std::pow(lambda, param_);
      break;
    case Kind::table: {
      bool found = false;
      for (std::size_t i = 0; i < lambdas_.size(); ++i) {
        if (std::abs(lambdas_[i] - lambda) <= 1e-12 * std::max(1.0, std::abs(lambda))) {
          v = values_[i];
          found = true;
          break;
        }
      }
      if (!found) throw std::domain_error(fmt::format("psi: no table entry for lambda={}", lambda));
      break;
    }
  }
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(fmt::format("psi: value {} at lambda={} is not positive", v, lambda));
  }
  return v;
}

std::vector<double> PsiFunction::on(std::span<const double> spectrum) const {
  std::vector<double> out;
  out.reserve(spectrum.size());
  for (double l : spectrum) out.push_back((*this)(l));
  return out;
}

PsiFunction PsiFunction::pow(double r) const {
  switch (kind_) {
    case Kind::constant:
      return constant(std::pow(param_, r));
    case Kind::monomial:
      return monomial(param_ * r);
    case Kind::table: {
      std::vector<double> v = values_;
      for (double& x : v) x = std::pow(x, r);
      return table(lambdas_, std::move(v));
    }
  }
  return *this;
}

std::optional<double> PsiFunction::exponent() const {
  if (kind_ == Kind::monomial) return param_;
  if (kind_ == Kind::constant && param_ == 1.0) return 0.0;
  return std::nullopt;
}

std::string PsiFunction::describe() const {
  switch (kind_) {
    case Kind::constant:
      return fmt::format("const:{}", param_);
    case Kind::monomial:
      return fmt::format("lambda^{}", param_);
    case Kind::table:
      return fmt::format("table[{}]", values_.size());
  }
  return {};
}

}  // namespace zigzag

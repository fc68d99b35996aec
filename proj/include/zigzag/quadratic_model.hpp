#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "zigzag/rng.hpp"

namespace zigzag {

using Vector = Eigen::VectorXd;

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Which eigenvalue distribution to generate.
///
/// `table2` sets 1..7 place v_1 = 1 and v_n = kappa and sample the interior
/// in per-set blocks; `isqrt` is lambda_i = i*sqrt(i); `uniform1n` fixes
/// lambda_1 = 1, lambda_n = n with a uniform interior; `twodim` is {1, kappa}.
struct SpectrumSpec {
  enum class Kind { table2, isqrt, uniform1n, twodim };

  Kind kind = Kind::table2;
  int set_id = 1;
  int n = 1000;
  double kappa = 1e4;
  std::uint64_t seed = 0;

  void validate() const;
  std::string name() const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Table-2 style spectrum, sorted ascending. Throws ModelError when n is too
/// small for the set's index blocks or a block's value range is empty.
std::vector<double> table2_spectrum(int set_id, int n, double kappa, Rng& rng);

/// "isqrt" or "uniform1n". `rng` is only consulted by "uniform1n".
std::vector<double> special_spectrum(std::string_view name, int n, Rng& rng);

std::vector<double> make_spectrum(const SpectrumSpec& spec);

/// Strictly convex quadratic f(x) = 1/2 x'Ax - b'x with A = Q diag(lambda) Q'.
///
/// Q is either the identity (diagonal problem) or a product of three
/// Householder reflections (I - 2 w3 w3')(I - 2 w2 w2')(I - 2 w1 w1'). A is
/// never formed; products are applied as reflect, scale, reflect. Instances
/// are immutable after construction.
class QuadraticProblem {
 public:
  struct Evaluation {
    double f = 0.0;
    Vector g;
  };

  static QuadraticProblem diagonal(std::vector<double> spectrum, Vector b);
  static QuadraticProblem rotated(std::vector<double> spectrum, std::array<Vector, 3> w, Vector b);

  int dim() const { return static_cast<int>(spectrum_.size()); }
  std::span<const double> spectrum() const { return spectrum_; }
  double lambda_min() const { return spectrum_.front(); }
  double lambda_max() const { return spectrum_.back(); }
  double condition_number() const { return lambda_max() / lambda_min(); }

  bool is_diagonal() const { return !rotated_; }
  /// Reflection vectors (w1, w2, w3); only meaningful when !is_diagonal().
  const std::array<Vector, 3>& reflections() const { return w_; }

  const Vector& b() const { return b_; }
  const Vector& x_star() const { return x_star_; }
  double f_star() const { return f_star_; }

  /// A v.
  Vector apply(const Vector& v) const;
  /// A^p v; p = 0 returns v.
  Vector apply_power(const Vector& v, int p) const;
  /// A^{-1} v.
  Vector solve(const Vector& v) const;

  /// f(x) and g = Ax - b with one application of A.
  Evaluation evaluate(const Vector& x) const;

  /// f(x) - f* from the gradient alone: 1/2 g'A^{-1}g. Nonnegative by
  /// construction, and free of the cancellation in f(x) - f*.
  double gap_from_gradient(const Vector& g) const;

  /// Q'v: components of v along the eigenvectors.
  Vector to_eigenbasis(const Vector& v) const;
  /// Q y.
  Vector from_eigenbasis(const Vector& y) const;

  /// Hash of (spectrum, rotation, b); equal problems hash equal.
  std::uint64_t fingerprint() const;

 private:
  QuadraticProblem() = default;
  void finish();

  std::vector<double> spectrum_;
  bool rotated_ = false;
  std::array<Vector, 3> w_;
  Vector b_;
  Vector x_star_;
  double f_star_ = 0.0;
};

QuadraticProblem make_diagonal(std::vector<double> spectrum, Vector b);

/// Random problem per the benchmark protocol: spectrum from `spec`, three
/// random unit reflection vectors, entries of b uniform on `b_range`. Fully
/// determined by spec.seed.
QuadraticProblem make_rotated(const SpectrumSpec& spec, Interval b_range);

/// Flat key=value block, e.g. "spectrum=set3 set_id=3 n=100 kappa=10000 seed=7 b_range=-10:10".
std::string to_kv(const SpectrumSpec& spec, Interval b_range);
std::pair<SpectrumSpec, Interval> parse_kv(std::string_view text);

}  // namespace zigzag

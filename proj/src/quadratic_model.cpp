#include "zigzag/quadratic_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace zigzag {
namespace {

struct Block {
  int first;  // 1-based, inclusive
  int last;
  double lo;
  double hi;
};

std::vector<Block> table2_blocks(int set_id, int n, double kappa) {
  const double half = kappa / 2.0;
  switch (set_id) {
    case 1:
      return {{2, n - 1, 1.0, kappa}};
    case 2:
      return {{2, n / 5, 1.0, 100.0}, {n / 5 + 1, n - 1, half, kappa}};
    case 3:
      return {{2, n / 2, 1.0, 100.0}, {n / 2 + 1, n - 1, half, kappa}};
    case 4:
      return {{2, 4 * n / 5, 1.0, 100.0}, {4 * n / 5 + 1, n - 1, half, kappa}};
    case 5:
      return {{2, n / 5, 1.0, 100.0}, {n / 5 + 1, 4 * n / 5, 100.0, half}, {4 * n / 5 + 1, n - 1, half, kappa}};
    case 6:
      return {{2, 10, 1.0, 100.0}, {11, n - 1, half, kappa}};
    case 7:
      return {{2, n - 10, 1.0, 100.0}, {n - 9, n - 1, half, kappa}};
    default:
      throw ModelError(fmt::format("spectrum: set_id {} not in 1..7", set_id));
  }
}

Vector random_unit_vector(int n, Rng& rng) {
  Vector w(n);
  for (;;) {
    for (int i = 0; i < n; ++i) w[i] = rng.uniform(-1.0, 1.0);
    const double norm = w.norm();
    if (norm > 1e-8) return w / norm;
  }
}

// v <- (I - 2ww')v
void reflect(const Vector& w, Vector& v) { v.noalias() -= (2.0 * w.dot(v)) * w; }

std::uint64_t hash_vector(std::uint64_t h, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) h = mix_seed({h, double_bits(v[i])});
  return h;
}

}  // namespace

void SpectrumSpec::validate() const {
  if (n < 2) throw ModelError(fmt::format("spectrum: n={} must be >= 2", n));
  switch (kind) {
    case Kind::table2:
      if (set_id < 1 || set_id > 7) throw ModelError(fmt::format("spectrum: set_id {} not in 1..7", set_id));
      if (!(kappa > 1.0) || !std::isfinite(kappa)) throw ModelError("spectrum: kappa must be > 1");
      break;
    case Kind::twodim:
      if (n != 2) throw ModelError("spectrum: twodim requires n = 2");
      if (!(kappa > 1.0) || !std::isfinite(kappa)) throw ModelError("spectrum: lambda must be > 1");
      break;
    case Kind::isqrt:
    case Kind::uniform1n:
      break;
  }
}

std::string SpectrumSpec::name() const {
  switch (kind) {
    case Kind::table2:
      return fmt::format("set{}", set_id);
    case Kind::isqrt:
      return "isqrt";
    case Kind::uniform1n:
      return "uniform1n";
    case Kind::twodim:
      return "twodim";
  }
  return {};
}

std::vector<double> table2_spectrum(int set_id, int n, double kappa, Rng& rng) {
  if (n < 2) throw ModelError("spectrum: n must be >= 2");
  if (!(kappa > 1.0)) throw ModelError("spectrum: kappa must be > 1");
  const auto blocks = table2_blocks(set_id, n, kappa);

  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  v.push_back(1.0);
  std::set<double> seen{1.0, kappa};

  for (const Block& b : blocks) {
    if (b.first > b.last) {
      if (blocks.size() == 1) continue;  // set 1 with n = 2 has no interior
      throw ModelError(fmt::format("spectrum: n={} too small for set {} (index block {}..{} empty)", n, set_id,
                                   b.first, b.last));
    }
    if (!(b.lo < b.hi) || b.hi > kappa) {
      throw ModelError(fmt::format("spectrum: kappa={} incompatible with set {} block ({}, {})", kappa, set_id,
                                   b.lo, b.hi));
    }
    for (int j = b.first; j <= b.last; ++j) {
      double x = rng.open_uniform(b.lo, b.hi);
      while (seen.contains(x)) x = rng.open_uniform(b.lo, b.hi);
      seen.insert(x);
      v.push_back(x);
    }
  }
  v.push_back(kappa);
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<double> special_spectrum(std::string_view name, int n, Rng& rng) {
  if (n < 1) throw ModelError("spectrum: n must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  if (name == "isqrt") {
    for (int i = 1; i <= n; ++i) v[static_cast<std::size_t>(i - 1)] = i * std::sqrt(static_cast<double>(i));
    return v;
  }
  if (name == "uniform1n") {
    const double top = static_cast<double>(n);
    v.front() = 1.0;
    v.back() = top;
    std::set<double> seen{1.0, top};
    for (int i = 1; i + 1 < n; ++i) {
      double x = rng.open_uniform(1.0, top);
      while (seen.contains(x)) x = rng.open_uniform(1.0, top);
      seen.insert(x);
      v[static_cast<std::size_t>(i)] = x;
    }
    std::sort(v.begin(), v.end());
    return v;
  }
  throw ModelError(fmt::format("spectrum: unknown special spectrum '{}'", name));
}

std::vector<double> make_spectrum(const SpectrumSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.kind) {
    case SpectrumSpec::Kind::table2:
      return table2_spectrum(spec.set_id, spec.n, spec.kappa, rng);
    case SpectrumSpec::Kind::isqrt:
      return special_spectrum("isqrt", spec.n, rng);
    case SpectrumSpec::Kind::uniform1n:
      return special_spectrum("uniform1n", spec.n, rng);
    case SpectrumSpec::Kind::twodim:
      return {1.0, spec.kappa};
  }
  return {};
}

QuadraticProblem QuadraticProblem::diagonal(std::vector<double> spectrum, Vector b) {
  QuadraticProblem p;
  p.spectrum_ = std::move(spectrum);
  p.b_ = std::move(b);
  p.finish();
  return p;
}

QuadraticProblem QuadraticProblem::rotated(std::vector<double> spectrum, std::array<Vector, 3> w, Vector b) {
  QuadraticProblem p;
  p.spectrum_ = std::move(spectrum);
  p.b_ = std::move(b);
  p.rotated_ = true;
  p.w_ = std::move(w);
  for (const Vector& wi : p.w_) {
    if (wi.size() != p.b_.size()) throw ModelError("problem: reflection vector dimension mismatch");
    if (std::abs(wi.norm() - 1.0) > 1e-12) throw ModelError("problem: reflection vectors must have unit norm");
  }
  p.finish();
  return p;
}

void QuadraticProblem::finish() {
  if (spectrum_.empty()) throw ModelError("problem: empty spectrum");
  if (static_cast<Eigen::Index>(spectrum_.size()) != b_.size()) {
    throw ModelError(fmt::format("problem: spectrum has {} entries but b has {}", spectrum_.size(), b_.size()));
  }
  for (std::size_t i = 0; i < spectrum_.size(); ++i) {
    if (!(spectrum_[i] > 0.0) || !std::isfinite(spectrum_[i])) {
      throw ModelError(fmt::format("problem: eigenvalue {} = {} is not positive", i + 1, spectrum_[i]));
    }
    if (i > 0 && spectrum_[i] < spectrum_[i - 1]) throw ModelError("problem: spectrum must be sorted ascending");
  }
  x_star_ = solve(b_);
  f_star_ = -0.5 * b_.dot(x_star_);
}

Vector QuadraticProblem::to_eigenbasis(const Vector& v) const {
  Vector y = v;
  if (rotated_) {
    // Q' = H1 H2 H3 (each reflection is symmetric)
    reflect(w_[2], y);
    reflect(w_[1], y);
    reflect(w_[0], y);
  }
  return y;
}

Vector QuadraticProblem::from_eigenbasis(const Vector& y) const {
  Vector v = y;
  if (rotated_) {
    reflect(w_[0], v);
    reflect(w_[1], v);
    reflect(w_[2], v);
  }
  return v;
}

Vector QuadraticProblem::apply(const Vector& v) const {
  const Eigen::Map<const Vector> lambda(spectrum_.data(), dim());
  if (!rotated_) return lambda.cwiseProduct(v);
  Vector y = to_eigenbasis(v);
  y.array() *= lambda.array();
  return from_eigenbasis(y);
}

Vector QuadraticProblem::apply_power(const Vector& v, int p) const {
  if (p < 0) throw ModelError("apply_power: negative power");
  Vector out = v;
  for (int i = 0; i < p; ++i) out = apply(out);
  return out;
}

Vector QuadraticProblem::solve(const Vector& v) const {
  const Eigen::Map<const Vector> lambda(spectrum_.data(), dim());
  Vector y = to_eigenbasis(v);
  y.array() /= lambda.array();
  return from_eigenbasis(y);
}

QuadraticProblem::Evaluation QuadraticProblem::evaluate(const Vector& x) const {
  if (x.size() != dim()) throw ModelError("evaluate: dimension mismatch");
  Evaluation e;
  e.g = apply(x) - b_;
  // 1/2 x'Ax - b'x = 1/2 x'(g + b) - b'x
  e.f = 0.5 * x.dot(e.g) - 0.5 * b_.dot(x);
  return e;
}

double QuadraticProblem::gap_from_gradient(const Vector& g) const {
  const Vector y = to_eigenbasis(g);
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) s += y[i] * y[i] / spectrum_[static_cast<std::size_t>(i)];
  return 0.5 * s;
}

std::uint64_t QuadraticProblem::fingerprint() const {
  std::uint64_t h = mix_seed({static_cast<std::uint64_t>(dim()), rotated_ ? 1u : 0u});
  for (double l : spectrum_) h = mix_seed({h, double_bits(l)});
  if (rotated_) {
    for (const Vector& w : w_) h = hash_vector(h, w);
  }
  return hash_vector(h, b_);
}

QuadraticProblem make_diagonal(std::vector<double> spectrum, Vector b) {
  return QuadraticProblem::diagonal(std::move(spectrum), std::move(b));
}

QuadraticProblem make_rotated(const SpectrumSpec& spec, Interval b_range) {
  if (b_range.lo > b_range.hi) throw ModelError("problem: empty b range");
  std::vector<double> spectrum = make_spectrum(spec);
  Rng rng(mix_seed({spec.seed, 0x726f74ULL}));
  std::array<Vector, 3> w;
  for (Vector& wi : w) wi = random_unit_vector(spec.n, rng);
  Vector b(spec.n);
  for (int i = 0; i < spec.n; ++i) b[i] = rng.uniform(b_range.lo, b_range.hi);
  return QuadraticProblem::rotated(std::move(spectrum), std::move(w), std::move(b));
}

std::string to_kv(const SpectrumSpec& spec, Interval b_range) {
  return fmt::format("spectrum={} set_id={} n={} kappa={:.17g} seed={} b_range={:.17g}:{:.17g}", spec.name(),
                     spec.set_id, spec.n, spec.kappa, spec.seed, b_range.lo, b_range.hi);
}

std::pair<SpectrumSpec, Interval> parse_kv(std::string_view text) {
  SpectrumSpec spec;
  Interval range;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ModelError(fmt::format("kv: malformed token '{}'", token));
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "spectrum") {
        if (value == "isqrt") {
          spec.kind = SpectrumSpec::Kind::isqrt;
        } else if (value == "uniform1n") {
          spec.kind = SpectrumSpec::Kind::uniform1n;
        } else if (value == "twodim") {
          spec.kind = SpectrumSpec::Kind::twodim;
        } else if (value.starts_with("set")) {
          spec.kind = SpectrumSpec::Kind::table2;
        } else {
          throw ModelError(fmt::format("kv: unknown spectrum '{}'", value));
        }
      } else if (key == "set_id") {
        spec.set_id = std::stoi(value);
      } else if (key == "n") {
        spec.n = std::stoi(value);
      } else if (key == "kappa") {
        spec.kappa = std::stod(value);
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "b_range") {
        const auto colon = value.find(':');
        if (colon == std::string::npos) throw ModelError("kv: b_range must be lo:hi");
        range.lo = std::stod(value.substr(0, colon));
        range.hi = std::stod(value.substr(colon + 1));
      } else {
        throw ModelError(fmt::format("kv: unknown key '{}'", key));
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const ModelError*>(&e)) throw;
      throw ModelError(fmt::format("kv: bad value for '{}': {}", key, value));
    }
  }
  return {spec, range};
}

}  // namespace zigzag

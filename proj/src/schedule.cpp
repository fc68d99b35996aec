#include "zigzag/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace zigzag {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(std::string_view tok, std::string_view what) {
  int v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty()) {
    throw ScheduleError(fmt::format("schedule: {} must be an integer, got '{}'", what, tok));
  }
  return v;
}

double parse_double(std::string_view tok, std::string_view what) {
  const std::string s(tok);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size()) {
    throw ScheduleError(fmt::format("schedule: {} must be a number, got '{}'", what, tok));
  }
  return v;
}

void expect_args(const std::vector<std::string_view>& parts, std::size_t lo, std::size_t hi) {
  const std::size_t n = parts.size() - 1;
  if (n < lo || n > hi) {
    throw ScheduleError(fmt::format("schedule: '{}' takes {} to {} parameters, got {}", parts[0], lo, hi, n));
  }
}

}  // namespace

Schedule Schedule::parse(std::string_view text) {
  const auto parts = split(text, ':');
  const std::string_view head = parts[0];
  Schedule s;
  auto plain = [&](Kind k) {
    expect_args(parts, 0, 0);
    s.kind = k;
  };
  if (head == "sd") {
    plain(Kind::sd);
  } else if (head == "mg") {
    plain(Kind::mg);
    s.u = 1;
  } else if (head == "family") {
    expect_args(parts, 1, 1);
    s.kind = Kind::family;
    s.u = parse_int(parts[1], "family exponent u");
  } else if (head == "bb1") {
    plain(Kind::bb1);
  } else if (head == "bb2") {
    plain(Kind::bb2);
  } else if (head == "yuan") {
    plain(Kind::yuan);
  } else if (head == "dy") {
    plain(Kind::dy);
  } else if (head == "hat") {
    plain(Kind::hat);
  } else if (head == "aopt") {
    plain(Kind::aopt);
  } else if (head == "sdc") {
    expect_args(parts, 2, 2);
    s.kind = Kind::sdc;
    s.h = parse_int(parts[1], "sdc h");
    s.s = parse_int(parts[2], "sdc s");
  } else if (head == "abbmin2") {
    expect_args(parts, 0, 2);
    s.kind = Kind::abbmin2;
    if (parts.size() > 1) s.tau = parse_double(parts[1], "abbmin2 tau");
    if (parts.size() > 2) s.memory = parse_int(parts[2], "abbmin2 memory");
  } else if (head == "alg1") {
    expect_args(parts, 5, 5);
    s.kind = Kind::alg1;
    if (parts[1] == "bb1") {
      s.bb = Bb::bb1;
    } else if (parts[1] == "bb2") {
      s.bb = Bb::bb2;
    } else {
      throw ScheduleError(fmt::format("schedule: alg1 BB variant must be bb1 or bb2, got '{}'", parts[1]));
    }
    if (parts[2] == "sd") {
      s.u = 0;
    } else if (parts[2] == "mg") {
      s.u = 1;
    } else {
      throw ScheduleError(fmt::format("schedule: alg1 family must be sd or mg, got '{}'", parts[2]));
    }
    s.kb = parse_int(parts[3], "Kb");
    s.km = parse_int(parts[4], "Km");
    s.ks = parse_int(parts[5], "Ks");
  } else {
    throw ScheduleError(fmt::format("schedule: unknown rule '{}'", head));
  }
  s.validate();
  return s;
}

std::string Schedule::to_string() const {
  switch (kind) {
    case Kind::sd: return "sd";
    case Kind::mg: return "mg";
    case Kind::family: return fmt::format("family:{}", u);
    case Kind::bb1: return "bb1";
    case Kind::bb2: return "bb2";
    case Kind::yuan: return "yuan";
    case Kind::dy: return "dy";
    case Kind::hat: return "hat";
    case Kind::aopt: return "aopt";
    case Kind::sdc: return fmt::format("sdc:{}:{}", h, s);
    case Kind::abbmin2:
      return memory == 9 ? fmt::format("abbmin2:{}", tau) : fmt::format("abbmin2:{}:{}", tau, memory);
    case Kind::alg1:
      return fmt::format("alg1:{}:{}:{}:{}:{}", bb == Bb::bb1 ? "bb1" : "bb2", u == 0 ? "sd" : "mg", kb, km, ks);
  }
  return {};
}

void Schedule::validate() const {
  switch (kind) {
    case Kind::family:
      if (u < 0) throw ScheduleError("schedule: family exponent must be >= 0");
      break;
    case Kind::sdc:
      if (h < 1 || s < 1) throw ScheduleError("schedule: sdc needs h, s >= 1");
      break;
    case Kind::abbmin2:
      if (!(tau > 0.0 && tau < 1.0)) throw ScheduleError("schedule: abbmin2 tau must lie in (0, 1)");
      if (memory < 1) throw ScheduleError("schedule: abbmin2 memory must be >= 1");
      break;
    case Kind::alg1:
      if (kb < 1 || km < 1 || ks < 1) throw ScheduleError("schedule: alg1 needs Kb, Km, Ks >= 1");
      if (u != 0 && u != 1) throw ScheduleError("schedule: alg1 family must be sd or mg");
      break;
    default:
      break;
  }
}

int Schedule::family_exponent() const {
  switch (kind) {
    case Kind::mg: return 1;
    case Kind::family:
    case Kind::alg1: return u;
    default: return 0;
  }
}

bool Schedule::takes_initial_step() const {
  switch (kind) {
    case Kind::bb1:
    case Kind::bb2:
    case Kind::abbmin2:
    case Kind::yuan:
    case Kind::hat:
    case Kind::alg1: return true;
    default: return false;
  }
}

bool Schedule::monotone() const {
  switch (kind) {
    case Kind::sd:
    case Kind::mg:
    case Kind::family:
    case Kind::dy:
    case Kind::sdc: return true;
    default: return false;
  }
}

int Schedule::moment_order() const { return std::max(2, family_exponent() + 1); }

Alg1Phase alg1_phase(int j, int kb, int km, int ks) {
  const int m = j % (kb + km + ks);
  if (m < kb) return Alg1Phase::bb;
  if (m < kb + km) return Alg1Phase::family;
  if (m == kb + km) return Alg1Phase::tilde;
  return Alg1Phase::tilde_reused;
}

Scheduler::Scheduler(Schedule schedule) : schedule_(schedule) { schedule_.validate(); }

StepChoice Scheduler::next(int k, const step::StepState& st, double alpha0) {
  using K = Schedule::Kind;
  const Schedule& sc = schedule_;
  if (k == 0 && sc.takes_initial_step()) return {alpha0, "init"};

  switch (sc.kind) {
    case K::sd: return {step::sd(st.moments), "sd"};
    case K::mg: return {step::mg(st.moments), "mg"};
    case K::family: return {step::family(st.moments, sc.u), "family"};
    case K::aopt: return {step::aopt(st.moments), "aopt"};
    case K::bb1: return {step::bb1(st), "bb1"};
    case K::bb2: return {step::bb2(st), "bb2"};
    case K::yuan: return {step::yuan(st), "yuan"};
    case K::hat: {
      if (!st.prev) throw step::StepError("hat: needs the previous iteration");
      return {step::hat(step::sd(st.prev->moments), step::sd(st.moments)), "hat"};
    }
    case K::dy:
      if (k % 4 < 2) return {step::sd(st.moments), "sd"};
      return {step::yuan(st), "yuan"};
    case K::sdc: {
      const int m = k % (sc.h + sc.s);
      if (m < sc.h) return {step::sd(st.moments), "sd"};
      if (m == sc.h) {
        frozen_ = step::yuan(st);
        return {frozen_, "yuan"};
      }
      return {frozen_, "yuan-reused"};
    }
    case K::abbmin2: {
      const double b1 = step::bb1(st);
      const double b2 = step::bb2(st);
      bb2_history_.push_back(b2);
      while (static_cast<int>(bb2_history_.size()) > sc.memory + 1) bb2_history_.pop_front();
      if (b2 < sc.tau * b1) {
        return {*std::min_element(bb2_history_.begin(), bb2_history_.end()), "abb-min"};
      }
      return {b1, "bb1"};
    }
    case K::alg1: {
      const int j = sc.takes_initial_step() ? k - 1 : k;
      switch (alg1_phase(j, sc.kb, sc.km, sc.ks)) {
        case Alg1Phase::bb:
          return {sc.bb == Schedule::Bb::bb1 ? step::bb1(st) : step::bb2(st), "bb"};
        case Alg1Phase::family:
          return {step::family(st.moments, sc.u), "family"};
        case Alg1Phase::tilde:
          frozen_ = sc.u == 0 ? step::yuan(st) : step::tilde_mg(st);
          return {frozen_, "tilde"};
        case Alg1Phase::tilde_reused:
          return {frozen_, "tilde-reused"};
      }
      break;
    }
  }
  throw step::StepError("scheduler: unhandled rule");
}

}  // namespace zigzag

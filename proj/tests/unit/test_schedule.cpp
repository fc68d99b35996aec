#include <doctest.h>

#include <string>
#include <vector>

#include "zigzag/schedule.hpp"
#include "zigzag/solver.hpp"

using namespace zigzag;

namespace {

std::vector<std::string> tags_of(const IterateTrace& t) {
  std::vector<std::string> out;
  for (const auto& r : t.records) out.emplace_back(r.tag);
  return out;
}

IterateTrace run_on(const std::string& schedule, int max_iter, int n = 30) {
  std::vector<double> lambda;
  for (int i = 1; i <= n; ++i) lambda.push_back(i * std::sqrt(static_cast<double>(i)));
  const auto p = make_diagonal(lambda, Vector::Zero(n));
  SolverConfig cfg;
  cfg.epsilon = 1e-300;
  cfg.max_iter = max_iter;
  return run(p, Schedule::parse(schedule), cfg, Vector::Ones(n));
}

step::StepState secant_state(double ss, double sy, double yy) {
  step::StepState s;
  s.moments.m = {1.0, 1.0, 1.0};
  s.secant = step::Secant{ss, sy, yy};
  return s;
}

}  // namespace

TEST_CASE("parse and to_string round trip") {
  for (const char* text : {"sd", "mg", "family:3", "bb1", "bb2", "yuan", "dy", "sdc:8:6", "abbmin2:0.8:5",
                           "alg1:bb2:mg:30:13:15", "hat", "aopt"}) {
    const auto s = Schedule::parse(text);
    CHECK(s.to_string() == text);
    CHECK(Schedule::parse(s.to_string()).to_string() == text);
  }
}

TEST_CASE("parse defaults") {
  const auto a = Schedule::parse("abbmin2");
  CHECK(a.tau == 0.9);
  CHECK(a.memory == 9);
  const auto s = Schedule::parse("sdc:8:6");
  CHECK(s.h == 8);
  CHECK(s.s == 6);
  const auto g = Schedule::parse("alg1:bb1:sd:100:9:13");
  CHECK(g.kind == Schedule::Kind::alg1);
  CHECK(g.bb == Schedule::Bb::bb1);
  CHECK(g.u == 0);
  CHECK(g.kb == 100);
  CHECK(g.km == 9);
  CHECK(g.ks == 13);
  CHECK(Schedule::parse("alg1:bb2:mg:1:1:1").u == 1);
}

TEST_CASE("parse errors") {
  for (const char* text : {"", "bogus", "family", "family:x", "family:-1", "sdc:8", "sdc:0:6", "abbmin2:1.5",
                           "abbmin2:0.9:0", "alg1:bb3:sd:1:1:1", "alg1:bb1:xx:1:1:1", "alg1:bb1:sd:0:1:1",
                           "sd:1", "dy:2"}) {
    CAPTURE(text);
    CHECK_THROWS_AS(Schedule::parse(text), ScheduleError);
  }
}

TEST_CASE("schedule properties") {
  CHECK(Schedule::parse("sd").monotone());
  CHECK(Schedule::parse("mg").monotone());
  CHECK(Schedule::parse("dy").monotone());
  CHECK(Schedule::parse("sdc:8:6").monotone());
  CHECK_FALSE(Schedule::parse("bb1").monotone());
  CHECK_FALSE(Schedule::parse("alg1:bb1:sd:2:2:2").monotone());
  CHECK(Schedule::parse("bb1").takes_initial_step());
  CHECK(Schedule::parse("alg1:bb1:mg:2:2:2").takes_initial_step());
  CHECK_FALSE(Schedule::parse("sd").takes_initial_step());
  CHECK_FALSE(Schedule::parse("dy").takes_initial_step());
  CHECK(Schedule::parse("family:3").moment_order() >= 4);
  CHECK(Schedule::parse("alg1:bb1:mg:2:2:2").family_exponent() == 1);
}

TEST_CASE("periodic phases with Kb = Km = Ks = 2") {
  const std::vector<Alg1Phase> want{Alg1Phase::bb,    Alg1Phase::bb,    Alg1Phase::family,
                                    Alg1Phase::family, Alg1Phase::tilde, Alg1Phase::tilde_reused};
  for (int j = 0; j < 12; ++j) CHECK(alg1_phase(j, 2, 2, 2) == want[static_cast<std::size_t>(j % 6)]);
}

TEST_CASE("periodic schedule tags in a run start after the initial step") {
  const auto t = run_on("alg1:bb1:sd:2:2:2", 13);
  const auto tags = tags_of(t);
  const std::vector<std::string> want{"init", "bb",    "bb",           "family", "family", "tilde",       "tilde-reused",
                                      "bb",   "bb",    "family",       "family", "tilde",  "tilde-reused"};
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(tags[k] == want[k]);
  CHECK(t.records[6].alpha == t.records[5].alpha);
}

TEST_CASE("DY tags follow mod(k, 4) < 2") {
  const auto tags = tags_of(run_on("dy", 8));
  const std::vector<std::string> want{"sd", "sd", "yuan", "yuan", "sd", "sd", "yuan", "yuan"};
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(tags[k] == want[k]);
}

TEST_CASE("SDC(8, 6): eight SD steps then six identical frozen Yuan steps") {
  const auto t = run_on("sdc:8:6", 28);
  for (int k = 0; k < 8; ++k) CHECK(t.records[static_cast<std::size_t>(k)].tag == "sd");
  const double frozen = t.records[8].alpha;
  for (int k = 8; k < 14; ++k) CHECK(t.records[static_cast<std::size_t>(k)].alpha == frozen);
  CHECK(t.records[14].tag == "sd");
  CHECK(t.records[22].alpha != frozen);
}

TEST_CASE("ABBmin2 switching and memory") {
  Scheduler s(Schedule::parse("abbmin2:0.9:1"));
  CHECK(s.next(0, secant_state(1, 1, 1), 0.7).tag == "init");
  auto c = s.next(1, secant_state(1, 1, 4), 0.0);  // bb1 = 1, bb2 = 0.25
  CHECK(c.tag == "abb-min");
  CHECK(c.alpha == 0.25);
  c = s.next(2, secant_state(1, 1, 1), 0.0);  // bb1 = bb2 = 1
  CHECK(c.tag == "bb1");
  CHECK(c.alpha == 1.0);
  c = s.next(3, secant_state(1, 1, 2), 0.0);  // bb2 = 0.5, window {1, 0.5}
  CHECK(c.tag == "abb-min");
  CHECK(c.alpha == 0.5);

  Scheduler wide(Schedule::parse("abbmin2:0.9:9"));
  wide.next(1, secant_state(1, 1, 4), 0.0);
  wide.next(2, secant_state(1, 1, 1), 0.0);
  CHECK(wide.next(3, secant_state(1, 1, 2), 0.0).alpha == 0.25);
}

TEST_CASE("initial step uses alpha0") {
  Scheduler s(Schedule::parse("bb2"));
  const auto c = s.next(0, secant_state(1, 1, 1), 0.123);
  CHECK(c.alpha == 0.123);
  CHECK(c.tag == "init");
}

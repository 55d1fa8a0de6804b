#include <cmath>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "stackgame/omp.hpp"
#include "stackgame/simulate.hpp"
#include "test_util.hpp"

using namespace stackgame;

namespace {

// rebuild the belief region from a trace by replaying the feedback rule
FeasibleRegion replay_region(const Game& game, const Trace& trace) {
  std::vector<Comparison> history;
  for (const auto& r : trace.rounds) {
    std::size_t l = r.manipulation.leader_action;
    Vec manipulated = add(game.follower_payoffs.at(l, r.manipulation.target),
                          r.manipulation.cost);
    auto column = [&](std::size_t f) {
      auto p = game.follower_payoffs.at(l, f);
      return Vec(p.begin(), p.end());
    };
    if (r.accepted) {
      for (std::size_t f = 0; f < game.follower_actions(); ++f) {
        if (f != r.manipulation.target) history.push_back({manipulated, column(f), true});
      }
    } else {
      history.push_back({manipulated, column(r.follower_action), false});
      for (std::size_t f = 0; f < game.follower_actions(); ++f) {
        if (f != r.follower_action) history.push_back({column(r.follower_action), column(f), true});
      }
    }
  }
  return region_from_history(history, UtilityKind::Linear, game.dims());
}

}  // namespace

TEST_SUITE_BEGIN("simulate");

TEST_CASE("the no-manipulation baseline accrues a constant gap") {
  Game hr = test_util::high_risk();
  Trace trace = run_episode(hr, PolicySpec::parse("nomanip"), 40, 1);
  REQUIRE(trace.rounds.size() == 40);
  for (const auto& r : trace.rounds) {
    CHECK(r.accepted);
    CHECK(r.leader_utility == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.instant_regret == doctest::Approx(0.4).epsilon(1e-9));
  }
  CHECK(cumulative_regret(trace) == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("feeding the oracle's offer every round earns zero regret") {
  Game hr = test_util::high_risk();
  OmpSolution best = solve_omp(hr);
  double cum = 0.0;
  for (int t = 0; t < 25; ++t) {
    std::size_t response = follower_respond(hr, best.manipulation);
    REQUIRE(response == best.manipulation.target);
    double realized = utility(hr.leader_model,
                              sub(hr.leader_payoffs.at(best.manipulation.leader_action, response),
                                  best.manipulation.cost));
    cum += best.leader_utility - realized;
  }
  CHECK(cum == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("a single round's regret is the utility gap") {
  Game hr = test_util::high_risk();
  Trace trace = run_episode(hr, PolicySpec::parse("nomanip"), 1, 1);
  REQUIRE(trace.rounds.size() == 1);
  CHECK(cumulative_regret(trace) ==
        doctest::Approx(trace.reference_utility - trace.rounds[0].leader_utility));
}

TEST_CASE("longeu explores the high-risk pair early and sometimes fails") {
  Game hr = test_util::high_risk();
  bool saw_early_failure = false;
  for (std::uint64_t seed = 1; seed <= 10 && !saw_early_failure; ++seed) {
    Trace trace = run_episode(hr, PolicySpec::parse("longeu+pfr"), 40, seed);
    for (const auto& r : trace.rounds) {
      if (r.t <= 8 && !r.accepted && r.manipulation.leader_action == 1 &&
          r.manipulation.target == 1)
        saw_early_failure = true;
    }
  }
  CHECK(saw_early_failure);
}

TEST_CASE("the true weight always survives the belief updates") {
  for (int i = 0; i < 12; ++i) {
    Game g = generate_uniform_game(2, 2, 2, ConstraintMode::C1, UtilityKind::Linear, 59000 + i);
    Trace trace = run_episode(g, PolicySpec::parse("longeu+pfr"), 15, 2);
    FeasibleRegion region = replay_region(g, trace);
    CHECK(region.contains(g.follower_model.weight.span(), 1e-9));
  }
}

TEST_CASE("rejected offers cut their accepting weights out of the region") {
  for (int i = 0; i < 12; ++i) {
    Game g = generate_uniform_game(2, 2, 2, ConstraintMode::C1, UtilityKind::Linear, 60000 + i);
    Trace trace = run_episode(g, PolicySpec::parse("longeu+pfr"), 15, 3);
    FeasibleRegion region = replay_region(g, trace);
    auto samples = sample_region(region, 200, 77 + i);
    for (const auto& r : trace.rounds) {
      if (r.accepted) continue;
      Vec manipulated = add(g.follower_payoffs.at(r.manipulation.leader_action,
                                                  r.manipulation.target),
                            r.manipulation.cost);
      auto chosen = g.follower_payoffs.at(r.manipulation.leader_action, r.follower_action);
      for (const auto& w : samples) {
        // no surviving weight strictly prefers the rejected offer
        CHECK(dot(w.span(), manipulated) <= dot(w.span(), chosen) + 1e-9);
      }
    }
  }
}

TEST_CASE("revealed best responses match the simulator") {
  for (int i = 0; i < 15; ++i) {
    Game g = generate_uniform_game(2, 2, 3, ConstraintMode::C1, UtilityKind::Linear, 61000 + i);
    Trace trace = run_episode(g, PolicySpec::parse("eu+pfr"), 12, 5);
    for (const auto& r : trace.rounds) {
      if (!r.accepted) {
        CHECK(r.follower_action == best_response(g, r.manipulation.leader_action));
      } else if (is_zero(r.manipulation.cost)) {
        CHECK(r.manipulation.target == best_response(g, r.manipulation.leader_action));
      }
    }
  }
}

TEST_CASE("instant regret never goes below the float floor on linear games") {
  for (const char* policy : {"longeu+pfr", "eu+mwmc", "longeu+rwmc"}) {
    for (int i = 0; i < 6; ++i) {
      Game g = generate_uniform_game(2, 2, 2, ConstraintMode::C2, UtilityKind::Linear,
                                     62000 + i);
      Trace trace = run_episode(g, PolicySpec::parse(policy), 20, 6);
      for (const auto& r : trace.rounds) CHECK(r.instant_regret >= -1e-9);
    }
  }
}

TEST_CASE("episodes are deterministic in their inputs") {
  Game hr = test_util::high_risk();
  std::ostringstream a;
  std::ostringstream b;
  write_trace_jsonl(run_episode(hr, PolicySpec::parse("longeu+mwmc"), 25, 9), a);
  write_trace_jsonl(run_episode(hr, PolicySpec::parse("longeu+mwmc"), 25, 9), b);
  CHECK(a.str() == b.str());
  std::ostringstream c;
  write_trace_jsonl(run_episode(hr, PolicySpec::parse("longeu+mwmc"), 25, 10), c);
  CHECK(a.str() != c.str());
}

TEST_CASE("eu and longeu coincide on a one-round horizon") {
  Game hr = test_util::high_risk();
  Trace a = run_episode(hr, PolicySpec::parse("eu+pfr"), 1, 4);
  Trace b = run_episode(hr, PolicySpec::parse("longeu+pfr"), 1, 4);
  REQUIRE(a.rounds.size() == 1);
  REQUIRE(b.rounds.size() == 1);
  CHECK(a.rounds[0].manipulation.leader_action == b.rounds[0].manipulation.leader_action);
  CHECK(a.rounds[0].manipulation.target == b.rounds[0].manipulation.target);
  CHECK(linf_distance(a.rounds[0].manipulation.cost, b.rounds[0].manipulation.cost) < 1e-12);
}

TEST_CASE("the jsonl trace carries a header, T rounds and a summary") {
  Game hr = test_util::high_risk();
  Trace trace = run_episode(hr, PolicySpec::parse("longeu+pfr"), 7, 1);
  std::ostringstream out;
  write_trace_jsonl(trace, out);
  std::istringstream in(out.str());
  std::string line;
  std::vector<nlohmann::json> lines;
  while (std::getline(in, line)) lines.push_back(nlohmann::json::parse(line));
  REQUIRE(lines.size() == 9);
  CHECK(lines[0]["policy"] == "longeu+pfr");
  CHECK(lines[0]["reference_utility"].get<double>() == doctest::Approx(1.4));
  CHECK(lines[0]["reference_approximate"] == false);
  CHECK(lines[1]["t"] == 1);
  CHECK(lines[8].contains("final_region"));
  // indices print 1-based in files
  CHECK(lines[1]["l"].get<int>() >= 1);
}

TEST_CASE("the csv trace has one row per round") {
  Game hr = test_util::high_risk();
  Trace trace = run_episode(hr, PolicySpec::parse("nomanip"), 5, 1);
  std::ostringstream out;
  write_trace_csv(trace, out);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] ==
        "seed,game_id,policy,t,l,f,cost_0,cost_1,accepted,utility,regret,cum_regret");
  CHECK(lines[1].find("1,high-risk,nomanip,1,1,1,0,0,1,1,0.4,0.4") == 0);
}

TEST_CASE("cobb-douglas episodes run against the approximate reference") {
  Game cd = generate_uniform_game(2, 2, 2, ConstraintMode::C1, UtilityKind::CobbDouglas, 303);
  PolicySpec spec = PolicySpec::parse("longeu+pfr");
  SUBCASE("with the matching belief") { spec.belief_kind = UtilityKind::CobbDouglas; }
  SUBCASE("with a linear surrogate belief") { spec.belief_kind = UtilityKind::Linear; }
  Trace trace = run_episode(cd, spec, 10, 2);
  CHECK(trace.reference_approximate);
  CHECK(trace.rounds.size() == 10);
}

TEST_CASE("policies run on ten-objective games") {
  Game g = generate_uniform_game(10, 2, 2, ConstraintMode::C2, UtilityKind::Linear, 909);
  EpisodeOptions options;
  options.samples = 128;
  for (const char* policy : {"longeu+pfr", "longeu+mwmc"}) {
    Trace trace = run_episode(g, PolicySpec::parse(policy), 8, 1, options);
    CHECK(trace.rounds.size() == 8);
    for (const auto& r : trace.rounds) CHECK(r.instant_regret >= -1e-9);
  }
}

TEST_CASE("single-leader-action games reduce to the pure elicitation loop") {
  // the smallest interesting shape: one row, two follower actions
  Game g(PayoffTensor::from_nested({{{1.0, 1.0}, {2.4, 1.0}}}),
         PayoffTensor::from_nested({{{1.0, 1.0}, {0.8, 0.2}}}),
         UtilityModel{UtilityKind::Linear, Weight({0.4, 0.6})},
         UtilityModel{UtilityKind::Linear, Weight({0.8, 0.2})});
  Trace trace = run_episode(g, PolicySpec::parse("longeu+pfr"), 30, 3);
  CHECK(trace.reference_utility == doctest::Approx(1.4).epsilon(1e-9));
  for (const auto& r : trace.rounds) CHECK(r.manipulation.leader_action == 0);
  // learning brings the late rounds close to the optimum
  double late = 0.0;
  for (std::size_t i = 20; i < 30; ++i) late += trace.rounds[i].instant_regret;
  CHECK(late / 10.0 < 0.1);
}

TEST_CASE("a single follower action leaves nothing to learn") {
  Game g(PayoffTensor::from_nested({{{1.0, 2.0}}, {{0.5, 0.5}}}),
         PayoffTensor::from_nested({{{1.0, 1.0}}, {{2.0, 2.0}}}),
         UtilityModel{UtilityKind::Linear, Weight({0.5, 0.5})},
         UtilityModel{UtilityKind::Linear, Weight({0.5, 0.5})});
  Trace trace = run_episode(g, PolicySpec::parse("longeu+pfr"), 5, 1);
  for (const auto& r : trace.rounds) {
    CHECK(r.accepted);
    CHECK(r.leader_utility == doctest::Approx(1.5));
    CHECK(r.instant_regret == doctest::Approx(0.0));
  }
}

TEST_CASE("cobb-douglas episodes run under the payoff-bounded constraint") {
  Game cd = generate_uniform_game(2, 2, 2, ConstraintMode::C2, UtilityKind::CobbDouglas, 404);
  PolicySpec spec = PolicySpec::parse("eu+pfr");
  spec.belief_kind = UtilityKind::CobbDouglas;
  Trace trace = run_episode(cd, spec, 10, 4);
  CHECK(trace.rounds.size() == 10);
  CHECK(trace.reference_approximate);
  GameView view = leader_view(cd);
  for (const auto& r : trace.rounds) CHECK_NOTHROW(validate_manipulation(view, r.manipulation));
}

TEST_CASE("preseeded best responses start from the no-manipulation optimum") {
  Game ps = test_util::play_safe();
  EpisodeOptions options;
  options.preseed_known_brs = true;
  Trace trace = run_episode(ps, PolicySpec::parse("longeu+pfr"), 5, 1, options);
  // the incumbent starts at the no-manipulation utility of 1, so every
  // chosen offer would earn at least that much when accepted
  for (const auto& r : trace.rounds) {
    double u_new = utility(ps.leader_model,
                           sub(ps.leader_payoffs.at(r.manipulation.leader_action,
                                                    r.manipulation.target),
                               r.manipulation.cost));
    CHECK(u_new >= 1.0 - 1e-9);
  }
}

TEST_SUITE_END();

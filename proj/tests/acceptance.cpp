// Acceptance suite: one pass/fail line per criterion. Criteria are selected
// by number on the command line (all by default); --cli names the built
// command-line binary for the end-to-end checks.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackgame/experiments.hpp"
#include "stackgame/omp.hpp"
#include "stackgame/policies.hpp"
#include "stackgame/rng.hpp"
#include "stackgame/simulate.hpp"
#include "test_util.hpp"

using namespace stackgame;

namespace {

std::string g_cli;

// --- criterion 1: fixed-game optimal manipulations through the CLI ---------

bool criterion_fixed_games(std::string& detail) {
  auto hr = test_util::run_command(g_cli + " solve --fixed high-risk --constraint c1");
  auto ps = test_util::run_command(g_cli + " solve --fixed play-safe --constraint c1");
  if (hr.exit_code != 0 || ps.exit_code != 0) {
    detail = "solver invocation failed";
    return false;
  }
  auto j_hr = nlohmann::json::parse(hr.output);
  auto j_ps = nlohmann::json::parse(ps.output);
  bool ok = j_hr["l"] == 2 && j_hr["f"] == 2 &&
            std::abs(j_hr["cost"][0].get<double>() - 0.4) <= 1e-9 &&
            std::abs(j_hr["cost"][1].get<double>()) <= 1e-9 &&
            std::abs(j_hr["leader_utility"].get<double>() - 1.4) <= 1e-9 &&
            std::abs(j_ps["leader_utility"].get<double>() - 1.625) <= 1e-9 &&
            std::abs(j_ps["cost"][0].get<double>() - 0.625) <= 1e-9 &&
            std::abs(j_ps["cost"][1].get<double>()) <= 1e-9;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "high-risk u=%.12g cost0=%.12g, play-safe u=%.12g cost0=%.12g",
                j_hr["leader_utility"].get<double>(), j_hr["cost"][0].get<double>(),
                j_ps["leader_utility"].get<double>(), j_ps["cost"][0].get<double>());
  detail = buf;
  return ok;
}

// --- criterion 2: exact solver vs grid reference ----------------------------

bool criterion_oracle_equivalence(std::string& detail) {
  double worst = 0.0;
  auto check = [&](std::size_t dims, int count, std::uint64_t base) {
    for (int i = 0; i < count; ++i) {
      for (auto constraint : {ConstraintMode::C1, ConstraintMode::C2}) {
        Game g = generate_uniform_game(dims, 2, 2, constraint, UtilityKind::Linear, base + i);
        double gap = std::abs(solve_omp(g).leader_utility -
                              brute_force_omp(g, 0.01).leader_utility);
        worst = std::max(worst, gap);
      }
    }
  };
  check(2, 50, 101000);
  check(3, 25, 102000);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "worst |solve - brute| = %.6g (tolerance 0.02)", worst);
  detail = buf;
  return worst <= 0.02;
}

// --- criterion 3: beneficial-game fractions ---------------------------------

bool criterion_beneficial_fraction(std::string& detail) {
  auto fraction = [](std::size_t dims, std::uint64_t base) {
    int beneficial = 0;
    for (int i = 0; i < 1000; ++i) {
      Game g = generate_uniform_game(dims, 2, 2, ConstraintMode::C1, UtilityKind::Linear,
                                     base + i);
      if (solve_omp(g).beneficial) ++beneficial;
    }
    return beneficial / 1000.0;
  };
  double f2 = fraction(2, 103000);
  double f10 = fraction(10, 104000);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "2D fraction %.3f (in [0.25,0.45]), 10D %.3f (in [0.35,0.55])",
                f2, f10);
  detail = buf;
  return f2 >= 0.25 && f2 <= 0.45 && f10 >= 0.35 && f10 <= 0.55;
}

// --- criterion 4: convergence of the asymptotic policy ----------------------

bool criterion_convergence(std::string& detail) {
  Game hr = test_util::high_risk();
  EpisodeOptions options;
  options.preseed_known_brs = true;
  Trace trace = run_episode(hr, PolicySpec::parse("longeuplus+pfr"), 500, 1, options);
  double worst_cost_gap = 0.0;
  double tail_regret = 0.0;
  bool all_accepted = true;
  bool right_pair = true;
  for (std::size_t i = 490; i < 500; ++i) {
    const auto& r = trace.rounds[i];
    right_pair = right_pair && r.manipulation.leader_action == 1 && r.manipulation.target == 1;
    all_accepted = all_accepted && r.accepted;
    worst_cost_gap = std::max(worst_cost_gap,
                              linf_distance(r.manipulation.cost, Vec{0.4, 0.0}));
    tail_regret += r.instant_regret;
  }
  tail_regret /= 10.0;
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "final-10 max cost gap %.4g (<=0.05), mean regret %.4g (<0.02), accepted=%d",
                worst_cost_gap, tail_regret, all_accepted ? 1 : 0);
  detail = buf;
  return right_pair && all_accepted && worst_cost_gap <= 0.05 && tail_regret < 0.02;
}

// --- criterion 5: the longeu choice never undercuts the incumbent -----------

bool criterion_incumbent_monotonicity(std::string& detail) {
  std::vector<Game> games;
  games.push_back(test_util::high_risk());
  games.push_back(test_util::play_safe());
  for (int i = 0; i < 4; ++i)
    games.push_back(generate_uniform_game(2, 2, 2, ConstraintMode::C1, UtilityKind::Linear,
                                          105000 + i));
  for (int i = 0; i < 4; ++i)
    games.push_back(generate_uniform_game(2, 2, 3, ConstraintMode::C2, UtilityKind::Linear,
                                          106000 + i));
  for (int i = 0; i < 2; ++i)
    games.push_back(generate_uniform_game(3, 2, 2, ConstraintMode::C1, UtilityKind::Linear,
                                          107000 + i));
  const char* policies[] = {"longeu+pfr", "longeu+rwmc", "longeu+mwmc"};

  EpisodeOptions options;
  options.preseed_known_brs = true;
  options.samples = 256;
  int episodes = 0;
  double worst_slack = 1e300;
  for (const auto& game : games) {
    if (episodes >= 100) break;
    for (const char* policy : policies) {
      if (episodes >= 100) break;
      for (std::uint64_t seed = 1; seed <= 3 && episodes < 100; ++seed) {
        Trace trace = run_episode(game, PolicySpec::parse(policy), 15, seed, options);
        ++episodes;
        // replay the incumbent from the trace
        double u_best = -1e300;
        for (std::size_t l = 0; l < game.leader_actions(); ++l) {
          std::size_t br = best_response(game, l);
          u_best = std::max(u_best, utility(game.leader_model, game.leader_payoffs.at(l, br)));
        }
        for (const auto& r : trace.rounds) {
          double u_new = utility(game.leader_model,
                                 sub(game.leader_payoffs.at(r.manipulation.leader_action,
                                                            r.manipulation.target),
                                     r.manipulation.cost));
          worst_slack = std::min(worst_slack, u_new - u_best);
          if (u_new < u_best - 1e-9) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%s on %s round %d: u_new %.9g < u_best %.9g",
                          policy, game.id.c_str(), r.t, u_new, u_best);
            detail = buf;
            return false;
          }
          u_best = std::max(u_best, r.leader_utility);
        }
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d episodes, worst u_new - u_best = %.3g (>= -1e-9)",
                episodes, worst_slack);
  detail = buf;
  return true;
}

// --- criterion 6: closed form vs numeric maximiser --------------------------

bool criterion_closed_form(std::string& detail) {
  Rng rng(108000);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    double alpha = rng.uniform(0.01, 1.5);
    double cmin = rng.uniform(0.0, 1.0);
    double cmax = cmin + rng.uniform(0.02, 1.5);
    TwoDRowGeometry geometry{alpha, {cmin, 0.0}, {cmax, 0.0}};
    double closed = closed_form_2d_cost(geometry, 0);
    if (!(closed < 0.5 * (cmin + cmax))) {
      detail = "stationary point not below the bound midpoint";
      return false;
    }
    // independent golden-section maximiser of (cmax-c)(c-cmin)/(alpha+c)
    auto value = [&](double c) { return (cmax - c) * (c - cmin) / (alpha + c); };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = cmin;
    double hi = cmax;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    for (int iter = 0; iter < 200; ++iter) {
      if (value(x1) < value(x2)) {
        lo = x1;
        x1 = x2;
        x2 = lo + phi * (hi - lo);
      } else {
        hi = x2;
        x2 = x1;
        x1 = hi - phi * (hi - lo);
      }
    }
    worst = std::max(worst, std::abs(closed - 0.5 * (lo + hi)));
  }
  char buf[80];
  std::snprintf(buf, sizeof(buf), "worst |closed - numeric| = %.3g (tolerance 1e-3)", worst);
  detail = buf;
  return worst <= 1e-3;
}

// --- criterion 7: sampler soundness -----------------------------------------

bool criterion_sampler(std::string& detail) {
  FeasibleRegion simplex3(3);
  auto samples = sample_region(simplex3, 10000, 109000);
  Vec mean(3, 0.0);
  for (const auto& w : samples) {
    for (std::size_t d = 0; d < 3; ++d) mean[d] += w[d];
  }
  double worst_mean = 0.0;
  for (std::size_t d = 0; d < 3; ++d)
    worst_mean = std::max(worst_mean, std::abs(mean[d] / 10000.0 - 1.0 / 3.0));

  Rng rng(110000);
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Game g = generate_uniform_game(2, 2, 2, ConstraintMode::C1, UtilityKind::Linear,
                                   111000 + trial);
    GameView view = leader_view(g);
    double lo = rng.uniform(0.0, 0.6);
    double hi = lo + rng.uniform(0.05, 1.0 - lo);
    FeasibleRegion region = FeasibleRegion(2)
                                .with({{1.0 - lo, -lo}, false})
                                .with({{-(1.0 - hi), hi}, false});
    auto cloud = sample_region(region, 512, 112000 + trial);
    Manipulation m{rng.below(2), rng.below(2), {rng.uniform(0.0, 0.6), rng.uniform(0.0, 0.6)}};
    double exact = accept_probability(region, view, m, cloud);
    double estimate = accept_probability_mc(view, m, cloud);
    worst_gap = std::max(worst_gap, std::abs(exact - estimate));
  }
  char buf[112];
  std::snprintf(buf, sizeof(buf),
                "3-simplex mean error %.4g (<=0.02), exact-vs-mc gap %.4g (<=0.15)", worst_mean,
                worst_gap);
  detail = buf;
  return worst_mean <= 0.02 && worst_gap <= 0.15;
}

// --- criterion 8: policy ordering at desk scale ------------------------------

bool criterion_policy_ordering(std::string& detail) {
  ExperimentConfig cfg;
  cfg.generator = GeneratorKind::UniformRandom;
  cfg.dims = 2;
  cfg.constraint = ConstraintMode::C2;
  cfg.policies = {PolicySpec::parse("longeu+pfr"), PolicySpec::parse("eu+mwmc"),
                  PolicySpec::parse("longeu+mwmc"), PolicySpec::parse("longeu+rwmc")};
  cfg.horizons = {40};
  cfg.replications = 200;
  cfg.base_seed = 42;
  cfg.workers = 4;
  auto rows = run_experiment(cfg);
  std::map<std::string, SummaryRow> by_policy;
  for (const auto& r : rows) by_policy[r.policy] = r;
  const auto& pfr = by_policy["longeu+pfr"];
  const auto& eu_mwmc = by_policy["eu+mwmc"];
  const auto& mwmc = by_policy["longeu+mwmc"];
  const auto& rwmc = by_policy["longeu+rwmc"];
  bool first = pfr.mean_final_cr <= eu_mwmc.mean_final_cr + eu_mwmc.se_final_cr;
  bool second = mwmc.mean_final_cr <= rwmc.mean_final_cr + rwmc.se_final_cr;
  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "longeu+pfr %.4g <= eu+mwmc %.4g + %.3g; longeu+mwmc %.4g <= longeu+rwmc %.4g + %.3g",
                pfr.mean_final_cr, eu_mwmc.mean_final_cr, eu_mwmc.se_final_cr,
                mwmc.mean_final_cr, rwmc.mean_final_cr, rwmc.se_final_cr);
  detail = buf;
  return first && second;
}

// --- criterion 9: sublinear regret growth ------------------------------------

bool criterion_sublinearity(std::string& detail) {
  double early = 0.0;
  double late = 0.0;
  int found = 0;
  std::uint64_t seed = 113000;
  while (found < 100) {
    Game g = generate_uniform_game(2, 2, 2, ConstraintMode::C2, UtilityKind::Linear, seed++);
    if (!solve_omp(g).beneficial) continue;
    ++found;
    Trace trace = run_episode(g, PolicySpec::parse("longeu+pfr"), 80, 9);
    for (const auto& r : trace.rounds) {
      if (r.t <= 40) {
        early += r.instant_regret;
      } else {
        late += r.instant_regret;
      }
    }
  }
  early /= 100.0 * 40.0;
  late /= 100.0 * 40.0;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "mean per-round regret %.5g (rounds 1-40) vs %.5g (41-80)",
                early, late);
  detail = buf;
  return late < early;
}

// --- criterion 10: worker-count determinism ----------------------------------

bool criterion_determinism(std::string& detail) {
  std::string base = g_cli +
                     " experiment --generator uniform --dims 2"
                     " --policies longeu+pfr,longeu+mwmc --horizons 10,20 --constraint c2"
                     " --reps 24 --seed 2024";
  auto w1 = test_util::run_command(base + " --workers 1 --out /tmp/stackgame_det_w1.csv");
  auto w4 = test_util::run_command(base + " --workers 4 --out /tmp/stackgame_det_w4.csv");
  auto w4b = test_util::run_command(base + " --workers 4 --out /tmp/stackgame_det_w4b.csv");
  if (w1.exit_code != 0 || w4.exit_code != 0 || w4b.exit_code != 0) {
    detail = "experiment invocation failed";
    return false;
  }
  std::string a = test_util::read_file("/tmp/stackgame_det_w1.csv");
  std::string b = test_util::read_file("/tmp/stackgame_det_w4.csv");
  std::string c = test_util::read_file("/tmp/stackgame_det_w4b.csv");
  detail = a == b && b == c ? "summary CSV byte-identical across worker counts and reruns"
                            : "summary CSV differs";
  return a == b && b == c;
}

struct Criterion {
  int number;
  const char* label;
  std::function<bool(std::string&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--cli" && i + 1 < argc) {
      g_cli = argv[++i];
    } else {
      selected.push_back(std::atoi(arg.c_str()));
    }
  }
  if (g_cli.empty()) g_cli = "./stackgame";

  const Criterion criteria[] = {
      {1, "fixed-game optimal manipulation through the CLI", criterion_fixed_games},
      {2, "exact solver matches the grid reference", criterion_oracle_equivalence},
      {3, "beneficial-game fractions", criterion_beneficial_fraction},
      {4, "asymptotic policy converges to the optimal cost", criterion_convergence},
      {5, "longeu offers never undercut the incumbent", criterion_incumbent_monotonicity},
      {6, "closed-form stationary point", criterion_closed_form},
      {7, "sampler soundness", criterion_sampler},
      {8, "policy ordering at desk scale", criterion_policy_ordering},
      {9, "sublinear regret growth", criterion_sublinearity},
      {10, "worker-count determinism", criterion_determinism},
  };

  int failures = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.number) == selected.end())
      continue;
    ++ran;
    std::string in_detail;
    bool ok = false;
    try {
      ok = c.run(in_detail);
    } catch (const std::exception& e) {
      in_detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d %s: %s (%s)\n", c.number, ok ? "PASS" : "FAIL", c.label,
                in_detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criteria selected\n");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}

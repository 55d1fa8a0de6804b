#include "stackgame/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "stackgame/game_io.hpp"
#include "stackgame/omp.hpp"
#include "stackgame/rng.hpp"
#include "stackgame/simulate.hpp"

namespace stackgame {

Game fixed_game(FixedGameName name) {
  if (name == FixedGameName::HighRisk) {
    PayoffTensor leader = PayoffTensor::from_nested({{{1.0, 1.0}, {1.6, 1.2}},
                                                     {{0.1, 0.1}, {2.4, 1.0}}});
    PayoffTensor follower = PayoffTensor::from_nested({{{1.0, 1.0}, {0.8, 0.2}},
                                                       {{1.0, 1.0}, {0.8, 0.2}}});
    UtilityModel leader_model{UtilityKind::Linear, Weight({0.4, 0.6})};
    UtilityModel follower_model{UtilityKind::Linear, Weight({0.8, 0.2})};
    return Game(std::move(leader), std::move(follower), std::move(leader_model),
                std::move(follower_model), ConstraintMode::C1, 40, "high-risk");
  }
  PayoffTensor leader = PayoffTensor::from_nested({{{1.0, 1.0}, {1.3, 1.3}},
                                                   {{0.1, 0.1}, {2.0, 2.0}}});
  PayoffTensor follower = PayoffTensor::from_nested({{{1.0, 1.0}, {0.9, 0.9}},
                                                     {{1.0, 1.0}, {0.5, 0.5}}});
  UtilityModel leader_model{UtilityKind::Linear, Weight({0.6, 0.4})};
  UtilityModel follower_model{UtilityKind::Linear, Weight({0.8, 0.2})};
  return Game(std::move(leader), std::move(follower), std::move(leader_model),
              std::move(follower_model), ConstraintMode::C1, 40, "play-safe");
}

Game generate_uniform_game(std::size_t dims, std::size_t leader_actions,
                           std::size_t follower_actions, ConstraintMode constraint,
                           UtilityKind utility_kind, std::uint64_t seed) {
  if (dims < 2) throw std::invalid_argument("games need at least two objectives");
  if (leader_actions < 1 || follower_actions < 1)
    throw std::invalid_argument("games need at least one action per player");
  Rng rng(mix_seed(seed, fnv1a("uniform-game")));
  double shift = utility_kind == UtilityKind::CobbDouglas ? 0.01 : 0.0;
  auto draw_tensor = [&] {
    PayoffTensor t(leader_actions, follower_actions, dims);
    Vec payoff(dims);
    for (std::size_t l = 0; l < leader_actions; ++l) {
      for (std::size_t f = 0; f < follower_actions; ++f) {
        for (std::size_t d = 0; d < dims; ++d) payoff[d] = shift + rng.uniform();
        t.set(l, f, payoff);
      }
    }
    return t;
  };
  PayoffTensor leader = draw_tensor();
  PayoffTensor follower = draw_tensor();
  UtilityModel leader_model{utility_kind, Weight(sample_simplex(dims, rng))};
  UtilityModel follower_model{utility_kind, Weight(sample_simplex(dims, rng))};
  return Game(std::move(leader), std::move(follower), std::move(leader_model),
              std::move(follower_model), constraint, 40,
              "uniform-s" + std::to_string(seed));
}

namespace {

Game make_replication_game(const ExperimentConfig& cfg, int rep) {
  switch (cfg.generator) {
    case GeneratorKind::UniformRandom: {
      Game g = generate_uniform_game(cfg.dims, cfg.leader_actions, cfg.follower_actions,
                                     cfg.constraint, cfg.utility_kind,
                                     mix_seed(cfg.base_seed, fnv1a("game"),
                                              static_cast<std::uint64_t>(rep)));
      g.id = "uniform-" + std::to_string(rep);
      return g;
    }
    case GeneratorKind::HighRisk:
    case GeneratorKind::PlaySafe: {
      Game g = fixed_game(cfg.generator == GeneratorKind::HighRisk ? FixedGameName::HighRisk
                                                                   : FixedGameName::PlaySafe);
      g.constraint = cfg.constraint;
      g.id += "#" + std::to_string(rep);
      return g;
    }
    case GeneratorKind::FromFile: {
      Game g = load_game(cfg.game_file);
      g.id += "#" + std::to_string(rep);
      return g;
    }
  }
  throw std::logic_error("unreachable generator kind");
}

bool game_is_beneficial(const Game& game, double cd_grid_step) {
  if (game.follower_model.kind == UtilityKind::Linear) return solve_omp(game).beneficial;
  return brute_force_omp(game, cd_grid_step).beneficial;
}

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (c == '+' || c == '#' || c == '/' || c == ' ') c = '_';
  }
  return s;
}

}  // namespace

std::vector<SummaryRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (cfg.policies.empty()) throw std::invalid_argument("no policies configured");
  if (cfg.horizons.empty()) throw std::invalid_argument("no horizons configured");
  for (int T : cfg.horizons) {
    if (T < 1) throw std::invalid_argument("horizons must be at least 1");
  }
  for (const auto& p : cfg.policies) p.validate();
  if (cfg.generator == GeneratorKind::FromFile && cfg.game_file.empty())
    throw std::invalid_argument("generator \"file\" needs game_file");

  if (!cfg.traces_dir.empty()) std::filesystem::create_directories(cfg.traces_dir);

  std::size_t cells = cfg.policies.size() * cfg.horizons.size();
  std::size_t reps = static_cast<std::size_t>(cfg.replications);
  std::vector<std::vector<double>> final_cr(reps, std::vector<double>(cells, 0.0));
  std::vector<char> beneficial(reps, 0);

  EpisodeOptions options;
  options.samples = cfg.samples;
  options.preseed_known_brs = cfg.preseed_known_brs;

  auto run_replication = [&](std::size_t rep) {
    Game game = make_replication_game(cfg, static_cast<int>(rep));
    beneficial[rep] = game_is_beneficial(game, options.reference_grid_step) ? 1 : 0;
    std::size_t cell = 0;
    for (const auto& policy : cfg.policies) {
      for (int T : cfg.horizons) {
        Trace trace = run_episode(game, policy, T, cfg.base_seed, options);
        final_cr[rep][cell] = cumulative_regret(trace);
        if (!cfg.traces_dir.empty()) {
          std::string path = cfg.traces_dir + "/" + sanitize(policy.name()) + "_T" +
                             std::to_string(T) + "_rep" + std::to_string(rep) + ".jsonl";
          std::ofstream out(path);
          if (!out) throw std::runtime_error("cannot write trace file: " + path);
          write_trace_jsonl(trace, out);
        }
        ++cell;
      }
    }
  };

  int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (std::size_t rep = 0; rep < reps; ++rep) run_replication(rep);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) {
      pool.emplace_back([&] {
        for (std::size_t rep = next.fetch_add(1); rep < reps; rep = next.fetch_add(1))
          run_replication(rep);
      });
    }
    for (auto& t : pool) t.join();
  }

  double beneficial_fraction = 0.0;
  for (char b : beneficial) beneficial_fraction += b;
  beneficial_fraction /= static_cast<double>(reps);

  std::vector<SummaryRow> rows;
  rows.reserve(cells);
  std::size_t cell = 0;
  for (const auto& policy : cfg.policies) {
    for (int T : cfg.horizons) {
      double mean = 0.0;
      for (std::size_t rep = 0; rep < reps; ++rep) mean += final_cr[rep][cell];
      mean /= static_cast<double>(reps);
      double se = 0.0;
      if (reps > 1) {
        double ss = 0.0;
        for (std::size_t rep = 0; rep < reps; ++rep) {
          double d = final_cr[rep][cell] - mean;
          ss += d * d;
        }
        se = std::sqrt(ss / static_cast<double>(reps - 1)) /
             std::sqrt(static_cast<double>(reps));
      }
      rows.push_back({policy.name(), T, mean, se, cfg.replications, beneficial_fraction});
      ++cell;
    }
  }

  if (!cfg.out_path.empty()) {
    std::ofstream out(cfg.out_path);
    if (!out) throw std::runtime_error("cannot write summary file: " + cfg.out_path);
    write_summary_csv(rows, out);
  }
  return rows;
}

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out) {
  out << "policy,T,mean_cr,se_cr,reps,beneficial_frac\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    out << r.policy << "," << r.horizon << "," << num(r.mean_final_cr) << ","
        << num(r.se_final_cr) << "," << r.replications << "," << num(r.beneficial_fraction)
        << "\n";
  }
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  static const char* known_keys[] = {"generator",   "game_file",     "dims",
                                     "leader_actions", "follower_actions", "constraint",
                                     "utility",     "belief",        "policies",
                                     "horizons",    "replications",  "seed",
                                     "samples",     "workers",       "known_brs",
                                     "out",         "traces_dir"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* key : known_keys) {
      if (item.key() == key) known = true;
    }
    if (!known) throw std::invalid_argument("unknown config field: " + item.key());
  }

  ExperimentConfig cfg;
  std::string generator = j.value("generator", std::string("uniform"));
  if (generator == "uniform") {
    cfg.generator = GeneratorKind::UniformRandom;
  } else if (generator == "high-risk") {
    cfg.generator = GeneratorKind::HighRisk;
  } else if (generator == "play-safe") {
    cfg.generator = GeneratorKind::PlaySafe;
  } else if (generator == "file") {
    cfg.generator = GeneratorKind::FromFile;
  } else {
    throw std::invalid_argument("unknown generator: " + generator);
  }
  cfg.game_file = j.value("game_file", std::string());
  cfg.dims = j.value("dims", std::size_t{2});
  cfg.leader_actions = j.value("leader_actions", std::size_t{2});
  cfg.follower_actions = j.value("follower_actions", std::size_t{2});
  cfg.constraint = constraint_from_name(j.value("constraint", std::string("c2")));
  cfg.utility_kind = utility_kind_from_name(j.value("utility", std::string("linear")));
  UtilityKind belief = utility_kind_from_name(j.value("belief", std::string("linear")));
  if (!j.contains("policies")) throw std::invalid_argument("missing config field: policies");
  for (const auto& name : j.at("policies")) {
    PolicySpec spec = PolicySpec::parse(name.get<std::string>());
    spec.belief_kind = belief;
    spec.validate();
    cfg.policies.push_back(spec);
  }
  if (!j.contains("horizons")) throw std::invalid_argument("missing config field: horizons");
  cfg.horizons = j.at("horizons").get<std::vector<int>>();
  cfg.replications = j.value("replications", 1);
  cfg.base_seed = j.value("seed", std::uint64_t{1});
  cfg.samples = j.value("samples", std::size_t{512});
  cfg.workers = j.value("workers", 1);
  cfg.preseed_known_brs = j.value("known_brs", false);
  cfg.out_path = j.value("out", std::string());
  cfg.traces_dir = j.value("traces_dir", std::string());
  return cfg;
}

}  // namespace stackgame

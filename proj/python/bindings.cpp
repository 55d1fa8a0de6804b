#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "stackgame/experiments.hpp"
#include "stackgame/game_io.hpp"
#include "stackgame/omp.hpp"
#include "stackgame/simulate.hpp"

namespace py = pybind11;
using namespace stackgame;

namespace {

Game game_from_json_str(const std::string& text) {
  return game_from_json(nlohmann::json::parse(text));
}

std::string game_to_json_str(const Game& game) { return game_to_json(game).dump(2); }

std::string trace_jsonl_str(const Trace& trace) {
  std::ostringstream out;
  write_trace_jsonl(trace, out);
  return out.str();
}

std::string trace_csv_str(const Trace& trace) {
  std::ostringstream out;
  write_trace_csv(trace, out);
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "repeated multi-objective Stackelberg games with payoff manipulation "
            "(action indices are 0-based here; files and the CLI are 1-based)";

  py::enum_<UtilityKind>(m, "UtilityKind")
      .value("LINEAR", UtilityKind::Linear)
      .value("COBB_DOUGLAS", UtilityKind::CobbDouglas);

  py::enum_<ConstraintMode>(m, "ConstraintMode")
      .value("C1", ConstraintMode::C1)
      .value("C2", ConstraintMode::C2);

  py::class_<Manipulation>(m, "Manipulation")
      .def(py::init([](std::size_t l, std::size_t f, Vec cost) {
             return Manipulation{l, f, std::move(cost)};
           }),
           py::arg("leader_action"), py::arg("target"), py::arg("cost"))
      .def_readonly("leader_action", &Manipulation::leader_action)
      .def_readonly("target", &Manipulation::target)
      .def_readonly("cost", &Manipulation::cost)
      .def("__repr__", [](const Manipulation& m) {
        std::ostringstream s;
        s << "Manipulation(l=" << m.leader_action << ", f=" << m.target << ", cost=[";
        for (std::size_t d = 0; d < m.cost.size(); ++d)
          s << (d ? ", " : "") << m.cost[d];
        s << "])";
        return s.str();
      });

  py::class_<Game>(m, "Game")
      .def_property_readonly("dims", &Game::dims)
      .def_property_readonly("leader_actions", &Game::leader_actions)
      .def_property_readonly("follower_actions", &Game::follower_actions)
      .def_readwrite("constraint", &Game::constraint)
      .def_readwrite("horizon", &Game::horizon)
      .def_readwrite("id", &Game::id)
      .def_property_readonly("leader_weight",
                             [](const Game& g) { return g.leader_model.weight.values(); })
      .def_property_readonly("follower_weight",
                             [](const Game& g) { return g.follower_model.weight.values(); })
      .def("leader_payoff",
           [](const Game& g, std::size_t l, std::size_t f) {
             auto p = g.leader_payoffs.at(l, f);
             return Vec(p.begin(), p.end());
           })
      .def("follower_payoff",
           [](const Game& g, std::size_t l, std::size_t f) {
             auto p = g.follower_payoffs.at(l, f);
             return Vec(p.begin(), p.end());
           })
      .def("to_json", &game_to_json_str)
      .def("__repr__", [](const Game& g) {
        std::ostringstream s;
        s << "Game(id=" << g.id << ", " << g.leader_actions() << "x" << g.follower_actions()
          << ", dims=" << g.dims() << ")";
        return s.str();
      });

  py::class_<OmpSolution>(m, "OmpSolution")
      .def_readonly("manipulation", &OmpSolution::manipulation)
      .def_readonly("leader_utility", &OmpSolution::leader_utility)
      .def_readonly("beneficial", &OmpSolution::beneficial);

  py::class_<RoundRecord>(m, "RoundRecord")
      .def_readonly("t", &RoundRecord::t)
      .def_readonly("manipulation", &RoundRecord::manipulation)
      .def_readonly("follower_action", &RoundRecord::follower_action)
      .def_readonly("accepted", &RoundRecord::accepted)
      .def_readonly("leader_utility", &RoundRecord::leader_utility)
      .def_readonly("instant_regret", &RoundRecord::instant_regret)
      .def_readonly("cum_regret", &RoundRecord::cum_regret);

  py::class_<Trace>(m, "Trace")
      .def_readonly("game_id", &Trace::game_id)
      .def_readonly("policy", &Trace::policy)
      .def_readonly("seed", &Trace::seed)
      .def_readonly("horizon", &Trace::horizon)
      .def_readonly("reference_utility", &Trace::reference_utility)
      .def_readonly("reference_approximate", &Trace::reference_approximate)
      .def_readonly("rounds", &Trace::rounds)
      .def("to_jsonl", &trace_jsonl_str)
      .def("to_csv", &trace_csv_str);

  py::class_<SummaryRow>(m, "SummaryRow")
      .def_readonly("policy", &SummaryRow::policy)
      .def_readonly("horizon", &SummaryRow::horizon)
      .def_readonly("mean_final_cr", &SummaryRow::mean_final_cr)
      .def_readonly("se_final_cr", &SummaryRow::se_final_cr)
      .def_readonly("replications", &SummaryRow::replications)
      .def_readonly("beneficial_fraction", &SummaryRow::beneficial_fraction);

  py::class_<TwoDRowGeometry>(m, "TwoDRowGeometry")
      .def(py::init([](double alpha, std::array<double, 2> cost_min,
                       std::array<double, 2> cost_max) {
             return TwoDRowGeometry{alpha, cost_min, cost_max};
           }),
           py::arg("alpha"), py::arg("cost_min"), py::arg("cost_max"))
      .def_readonly("alpha", &TwoDRowGeometry::alpha)
      .def_readonly("cost_min", &TwoDRowGeometry::cost_min)
      .def_readonly("cost_max", &TwoDRowGeometry::cost_max);

  m.def("fixed_game",
        [](const std::string& name) {
          if (name == "high-risk") return fixed_game(FixedGameName::HighRisk);
          if (name == "play-safe") return fixed_game(FixedGameName::PlaySafe);
          throw std::invalid_argument("unknown fixed game: " + name);
        },
        py::arg("name"), "built-in benchmark game: 'high-risk' or 'play-safe'");

  m.def("generate_uniform_game", &generate_uniform_game, py::arg("dims"),
        py::arg("leader_actions"), py::arg("follower_actions"),
        py::arg("constraint") = ConstraintMode::C1,
        py::arg("utility_kind") = UtilityKind::Linear, py::arg("seed") = 1);

  m.def("load_game", &load_game, py::arg("path"));
  m.def("save_game", &save_game, py::arg("game"), py::arg("path"));
  m.def("game_from_json", &game_from_json_str, py::arg("text"));

  m.def("best_response", &best_response, py::arg("game"), py::arg("leader_action"));
  m.def("follower_respond", &follower_respond, py::arg("game"), py::arg("manipulation"));
  m.def("solve_omp", &solve_omp, py::arg("game"));
  m.def("brute_force_omp", &brute_force_omp, py::arg("game"), py::arg("grid_step") = 0.01);
  m.def("play_safe_cost", &play_safe_cost, py::arg("game"), py::arg("leader_action"),
        py::arg("target"));
  m.def("minimal_cost_given_weight",
        [](const Game& game, Vec weight, std::size_t l, std::size_t f) {
          return minimal_cost_given_weight(leader_view(game), Weight(std::move(weight)), l, f);
        },
        py::arg("game"), py::arg("weight"), py::arg("leader_action"), py::arg("target"));

  m.def("closed_form_2d_cost", &closed_form_2d_cost, py::arg("geometry"),
        py::arg("objective"));

  m.def("run_episode",
        [](const Game& game, const std::string& policy, int T, std::uint64_t seed,
           std::size_t samples, bool known_brs, const std::string& belief) {
          PolicySpec spec = PolicySpec::parse(policy);
          spec.belief_kind = utility_kind_from_name(belief);
          EpisodeOptions options;
          options.samples = samples;
          options.preseed_known_brs = known_brs;
          int horizon = T > 0 ? T : game.horizon;
          return run_episode(game, spec, horizon, seed, options);
        },
        py::arg("game"), py::arg("policy"), py::arg("T") = 0, py::arg("seed") = 1,
        py::arg("samples") = 512, py::arg("known_brs") = false,
        py::arg("belief") = "linear");

  m.def("cumulative_regret", &cumulative_regret, py::arg("trace"));

  m.def("run_experiment",
        [](const std::string& config_json) {
          return run_experiment(experiment_config_from_json(nlohmann::json::parse(config_json)));
        },
        py::arg("config_json"),
        "run an experiment from a JSON config string; returns summary rows");
}

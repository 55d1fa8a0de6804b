#include "stackgame/game_io.hpp"

#include <fstream>

namespace stackgame {

std::string utility_kind_name(UtilityKind kind) {
  return kind == UtilityKind::Linear ? "linear" : "cobb-douglas";
}

UtilityKind utility_kind_from_name(const std::string& name) {
  if (name == "linear") return UtilityKind::Linear;
  if (name == "cobb-douglas") return UtilityKind::CobbDouglas;
  throw std::invalid_argument("unknown utility kind: " + name);
}

std::string constraint_name(ConstraintMode mode) {
  return mode == ConstraintMode::C1 ? "c1" : "c2";
}

ConstraintMode constraint_from_name(const std::string& name) {
  if (name == "c1") return ConstraintMode::C1;
  if (name == "c2") return ConstraintMode::C2;
  throw std::invalid_argument("unknown constraint mode: " + name);
}

namespace {

nlohmann::json tensor_to_json(const PayoffTensor& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t l = 0; l < t.leader_actions(); ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t f = 0; f < t.follower_actions(); ++f) {
      auto p = t.at(l, f);
      row.push_back(Vec(p.begin(), p.end()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PayoffTensor tensor_from_json(const nlohmann::json& j, std::size_t n_l, std::size_t n_f,
                              std::size_t dims, const char* field) {
  if (!j.is_array() || j.size() != n_l)
    throw std::invalid_argument(std::string(field) + " must be an array of leader_actions rows");
  PayoffTensor t(n_l, n_f, dims);
  for (std::size_t l = 0; l < n_l; ++l) {
    const auto& row = j[l];
    if (!row.is_array() || row.size() != n_f)
      throw std::invalid_argument(std::string(field) + " rows must have follower_actions entries");
    for (std::size_t f = 0; f < n_f; ++f) {
      Vec p = row[f].get<Vec>();
      if (p.size() != dims)
        throw std::invalid_argument(std::string(field) + " entries must have dims components");
      t.set(l, f, p);
    }
  }
  return t;
}

}  // namespace

nlohmann::json game_to_json(const Game& game) {
  nlohmann::json j;
  j["dims"] = game.dims();
  j["leader_actions"] = game.leader_actions();
  j["follower_actions"] = game.follower_actions();
  j["leader_payoffs"] = tensor_to_json(game.leader_payoffs);
  j["follower_payoffs"] = tensor_to_json(game.follower_payoffs);
  j["leader_weight"] = game.leader_model.weight.values();
  j["follower_weight"] = game.follower_model.weight.values();
  j["follower_utility"] = utility_kind_name(game.follower_model.kind);
  j["constraint"] = constraint_name(game.constraint);
  j["horizon"] = game.horizon;
  j["id"] = game.id;
  return j;
}

Game game_from_json(const nlohmann::json& j) {
  for (const char* field : {"dims", "leader_actions", "follower_actions", "leader_payoffs",
                            "follower_payoffs", "leader_weight", "follower_weight",
                            "follower_utility", "constraint"}) {
    if (!j.contains(field)) throw std::invalid_argument(std::string("missing field: ") + field);
  }
  std::size_t dims = j["dims"].get<std::size_t>();
  std::size_t n_l = j["leader_actions"].get<std::size_t>();
  std::size_t n_f = j["follower_actions"].get<std::size_t>();
  PayoffTensor leader = tensor_from_json(j["leader_payoffs"], n_l, n_f, dims, "leader_payoffs");
  PayoffTensor follower =
      tensor_from_json(j["follower_payoffs"], n_l, n_f, dims, "follower_payoffs");
  UtilityKind kind = utility_kind_from_name(j["follower_utility"].get<std::string>());
  UtilityModel leader_model{kind, Weight(j["leader_weight"].get<Vec>())};
  UtilityModel follower_model{kind, Weight(j["follower_weight"].get<Vec>())};
  ConstraintMode constraint = constraint_from_name(j["constraint"].get<std::string>());
  int horizon = j.value("horizon", 40);
  std::string id = j.value("id", std::string("game"));
  return Game(std::move(leader), std::move(follower), std::move(leader_model),
              std::move(follower_model), constraint, horizon, std::move(id));
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open game file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed game file " + path + ": " + e.what());
  }
  return game_from_json(j);
}

void save_game(const Game& game, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write game file: " + path);
  out << game_to_json(game).dump(2) << "\n";
}

}  // namespace stackgame

#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "stackgame/game.hpp"

namespace stackgame {

// Game file schema (JSON object):
//   dims              int
//   leader_actions    int
//   follower_actions  int
//   leader_payoffs    [leader][follower][dims] array of numbers
//   follower_payoffs  same shape
//   leader_weight     [dims]
//   follower_weight   [dims]
//   follower_utility  "linear" | "cobb-douglas"  (applies to both players)
//   constraint        "c1" | "c2"
//   horizon           int, optional (default 40)
//   id                string, optional
nlohmann::json game_to_json(const Game& game);
Game game_from_json(const nlohmann::json& j);

Game load_game(const std::string& path);
void save_game(const Game& game, const std::string& path);

std::string utility_kind_name(UtilityKind kind);
UtilityKind utility_kind_from_name(const std::string& name);
std::string constraint_name(ConstraintMode mode);
ConstraintMode constraint_from_name(const std::string& name);

}  // namespace stackgame

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "stackgame/vec.hpp"

namespace stackgame {

// Slack used when the follower compares a manipulated payoff against the
// best response; offers at exact indifference are accepted.
inline constexpr double kAcceptSlack = 1e-9;

inline constexpr double kWeightSumTol = 1e-9;

enum class UtilityKind { Linear, CobbDouglas };

enum class ConstraintMode { C1, C2 };

// Point on the probability simplex: nonnegative components summing to one.
class Weight {
 public:
  explicit Weight(Vec values);

  // rescales a nonnegative vector so the components sum to one
  static Weight normalized(Vec values);

  std::size_t dims() const { return v_.size(); }
  double operator[](std::size_t d) const { return v_[d]; }
  const Vec& values() const { return v_; }
  std::span<const double> span() const { return v_; }

 private:
  Vec v_;
};

struct UtilityModel {
  UtilityKind kind = UtilityKind::Linear;
  Weight weight;
};

// Scalar preference value of a payoff vector. Linear is the weighted sum;
// Cobb-Douglas is the weighted geometric form and requires a strictly
// positive payoff.
double utility(const UtilityModel& model, std::span<const double> payoff);

// Dense row-major [leader action][follower action][objective] payoff storage.
class PayoffTensor {
 public:
  PayoffTensor(std::size_t leader_actions, std::size_t follower_actions, std::size_t dims);
  static PayoffTensor from_nested(const std::vector<std::vector<Vec>>& rows);

  std::span<const double> at(std::size_t l, std::size_t f) const {
    return {data_.data() + (l * n_follower_ + f) * dims_, dims_};
  }
  void set(std::size_t l, std::size_t f, std::span<const double> payoff);

  std::size_t leader_actions() const { return n_leader_; }
  std::size_t follower_actions() const { return n_follower_; }
  std::size_t dims() const { return dims_; }

 private:
  std::size_t n_leader_;
  std::size_t n_follower_;
  std::size_t dims_;
  Vec data_;
};

// Leader's offer: play `leader_action`, pay `cost` to the follower if the
// follower responds with `target`.
struct Manipulation {
  std::size_t leader_action = 0;
  std::size_t target = 0;
  Vec cost;
};

struct Game {
  Game(PayoffTensor leader_payoffs, PayoffTensor follower_payoffs,
       UtilityModel leader_model, UtilityModel follower_model,
       ConstraintMode constraint = ConstraintMode::C1, int horizon = 40,
       std::string id = "game");

  PayoffTensor leader_payoffs;
  PayoffTensor follower_payoffs;
  UtilityModel leader_model;
  // ground truth for the simulator; policies never see this
  UtilityModel follower_model;
  ConstraintMode constraint;
  int horizon;
  std::string id;

  std::size_t dims() const { return leader_payoffs.dims(); }
  std::size_t leader_actions() const { return leader_payoffs.leader_actions(); }
  std::size_t follower_actions() const { return leader_payoffs.follower_actions(); }
};

// The leader-visible part of a game: both payoff tensors are public
// knowledge, the follower's utility model is not.
struct GameView {
  const PayoffTensor* leader_payoffs = nullptr;
  const PayoffTensor* follower_payoffs = nullptr;
  const UtilityModel* leader_model = nullptr;
  ConstraintMode constraint = ConstraintMode::C1;

  std::size_t dims() const { return leader_payoffs->dims(); }
  std::size_t leader_actions() const { return leader_payoffs->leader_actions(); }
  std::size_t follower_actions() const { return leader_payoffs->follower_actions(); }
  double leader_utility(std::span<const double> payoff) const {
    return utility(*leader_model, payoff);
  }
};

GameView leader_view(const Game& game);

// Follower's best response to leader action l under the true utility model;
// ties broken toward the lowest action index.
std::size_t best_response(const Game& game, std::size_t l);

// best response under an arbitrary linear weight (used with sampled weights)
std::size_t best_response_under(const PayoffTensor& follower_payoffs, const UtilityModel& model,
                                std::size_t l);

// The follower takes the offer when the manipulated payoff is at least as
// good as the unmanipulated best response (within kAcceptSlack); otherwise
// plays the best response.
std::size_t follower_respond(const Game& game, const Manipulation& m);

// Throws std::invalid_argument when the manipulation violates the cost
// constraints or indexes out of range.
void validate_manipulation(const GameView& view, const Manipulation& m);

}  // namespace stackgame

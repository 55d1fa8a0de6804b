#include "stackgame/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "stackgame/game_io.hpp"
#include "stackgame/omp.hpp"
#include "stackgame/rng.hpp"

namespace stackgame {

double reference_utility(const Game& game, double grid_step, bool& approximate) {
  if (game.follower_model.kind == UtilityKind::Linear) {
    approximate = false;
    return solve_omp(game).leader_utility;
  }
  approximate = true;
  return brute_force_omp(game, grid_step).leader_utility;
}

namespace {

void add_comparison(PolicyState& state, Comparison comparison) {
  state.region =
      state.region.with(constraint_from_comparison(comparison, state.belief_kind));
  state.history.push_back(std::move(comparison));
}

Vec payoff_vec(const PayoffTensor& t, std::size_t l, std::size_t f) {
  auto p = t.at(l, f);
  return Vec(p.begin(), p.end());
}

}  // namespace

void preseed_known_brs(PolicyState& state, const Game& game) {
  std::size_t best_l = 0;
  double best_u = -1e300;
  for (std::size_t l = 0; l < game.leader_actions(); ++l) {
    std::size_t br = best_response(game, l);
    state.known_brs[l] = br;
    for (std::size_t f = 0; f < game.follower_actions(); ++f) {
      if (f == br) continue;
      add_comparison(state, {payoff_vec(game.follower_payoffs, l, br),
                             payoff_vec(game.follower_payoffs, l, f), true});
    }
    double u = utility(game.leader_model, game.leader_payoffs.at(l, br));
    if (u > best_u) {
      best_u = u;
      best_l = l;
    }
  }
  state.incumbent = Manipulation{best_l, *state.known_brs[best_l], Vec(game.dims(), 0.0)};
  state.incumbent_utility = best_u;
}

Trace run_episode(const Game& game, const PolicySpec& spec, int T, std::uint64_t seed,
                  const EpisodeOptions& options) {
  spec.validate();
  if (T < 1) throw std::invalid_argument("the horizon must be at least one round");
  GameView view = leader_view(game);

  PolicyState state(game.dims(), game.leader_actions(), spec.belief_kind);
  if (spec.no_manipulation || options.preseed_known_brs) preseed_known_brs(state, game);

  Trace trace;
  trace.game_id = game.id;
  trace.policy = spec.name();
  trace.seed = seed;
  trace.horizon = T;
  trace.dims = game.dims();
  trace.constraint = constraint_name(game.constraint);
  trace.reference_utility =
      reference_utility(game, options.reference_grid_step, trace.reference_approximate);
  trace.rounds.reserve(static_cast<std::size_t>(T));

  // policy randomness is cell-specific; the sample stream is shared across
  // policies so that a horizon-1 longeu round replays an eu round exactly
  Rng rng(mix_seed(seed, fnv1a(game.id), fnv1a(trace.policy)));
  Rng sample_rng(mix_seed(seed, fnv1a(game.id), fnv1a("region-samples")));
  bool samples_dirty = true;
  double cum_regret = 0.0;

  for (int t = 1; t <= T; ++t) {
    std::uint64_t round_seed = sample_rng.next_u64();
    if (samples_dirty) {
      refresh_samples(state, options.samples, round_seed);
      samples_dirty = false;
    }

    Manipulation offer = decide(state, view, spec, t, T, rng);
    std::size_t response = follower_respond(game, offer);
    bool accepted = response == offer.target;

    double realized;
    if (accepted) {
      realized = utility(game.leader_model,
                         sub(game.leader_payoffs.at(offer.leader_action, offer.target),
                             offer.cost));
    } else {
      realized = utility(game.leader_model, game.leader_payoffs.at(offer.leader_action, response));
    }

    // pairwise feedback: the chosen payoff beats every alternative column;
    // a rejection additionally orders the chosen payoff strictly above the
    // manipulated one
    Vec manipulated =
        add(game.follower_payoffs.at(offer.leader_action, offer.target), offer.cost);
    std::size_t before = state.history.size();
    if (accepted) {
      for (std::size_t f = 0; f < game.follower_actions(); ++f) {
        if (f == offer.target) continue;
        add_comparison(state,
                       {manipulated, payoff_vec(game.follower_payoffs, offer.leader_action, f),
                        true});
      }
    } else {
      add_comparison(state, {manipulated,
                             payoff_vec(game.follower_payoffs, offer.leader_action, response),
                             false});
      for (std::size_t f = 0; f < game.follower_actions(); ++f) {
        if (f == response) continue;
        add_comparison(state,
                       {payoff_vec(game.follower_payoffs, offer.leader_action, response),
                        payoff_vec(game.follower_payoffs, offer.leader_action, f), true});
      }
    }
    if (state.history.size() != before) samples_dirty = true;

    // a rejection reveals the best response; so does a zero-cost probe
    if (!state.known_brs[offer.leader_action]) {
      if (!accepted) {
        state.known_brs[offer.leader_action] = response;
      } else if (is_zero(offer.cost)) {
        state.known_brs[offer.leader_action] = offer.target;
      }
    }

    // the realised outcome is itself a repeatable manipulation
    Manipulation realized_play =
        accepted ? offer : Manipulation{offer.leader_action, response, Vec(game.dims(), 0.0)};
    if (!state.incumbent || realized > state.incumbent_utility) {
      state.incumbent = std::move(realized_play);
      state.incumbent_utility = realized;
    }

    double instant = trace.reference_utility - realized;
    cum_regret += instant;
    trace.rounds.push_back({t, offer, response, accepted, realized, instant, cum_regret});
    state.round = t + 1;
  }

  trace.final_region.dims = game.dims();
  trace.final_region.constraint_count = state.region.constraints().size();
  if (game.dims() == 2) {
    auto iv = state.region.interval();
    trace.final_region.w1_lo = iv.lo;
    trace.final_region.w1_hi = iv.hi;
    trace.final_region.centroid = {iv.mid(), 1.0 - iv.mid()};
  } else {
    trace.final_region.centroid = centroid(state.region, rng.next_u64()).values();
  }
  if (options.keep_region_detail) {
    trace.final_region.constraints = state.region.constraints();
    auto cloud = sample_region(state.region, 64, rng.next_u64());
    for (const auto& w : cloud) trace.final_region.sample_cloud.push_back(w.values());
  }
  return trace;
}

double cumulative_regret(const Trace& trace) {
  return trace.rounds.empty() ? 0.0 : trace.rounds.back().cum_regret;
}

namespace {

nlohmann::json round_to_json(const RoundRecord& r) {
  nlohmann::json j;
  j["t"] = r.t;
  j["l"] = r.manipulation.leader_action + 1;
  j["f"] = r.manipulation.target + 1;
  j["cost"] = r.manipulation.cost;
  j["follower"] = r.follower_action + 1;
  j["accepted"] = r.accepted;
  j["utility"] = r.leader_utility;
  j["regret"] = r.instant_regret;
  j["cum_regret"] = r.cum_regret;
  return j;
}

}  // namespace

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
  nlohmann::json header;
  header["game_id"] = trace.game_id;
  header["policy"] = trace.policy;
  header["seed"] = trace.seed;
  header["T"] = trace.horizon;
  header["dims"] = trace.dims;
  header["constraint"] = trace.constraint;
  header["reference_utility"] = trace.reference_utility;
  header["reference_approximate"] = trace.reference_approximate;
  out << header.dump() << "\n";
  for (const auto& r : trace.rounds) out << round_to_json(r).dump() << "\n";
  nlohmann::json footer;
  footer["cumulative_regret"] = cumulative_regret(trace);
  nlohmann::json region;
  region["dims"] = trace.final_region.dims;
  region["constraints"] = trace.final_region.constraint_count;
  if (trace.final_region.w1_lo)
    region["w1_interval"] = {*trace.final_region.w1_lo, *trace.final_region.w1_hi};
  region["centroid"] = trace.final_region.centroid;
  footer["final_region"] = region;
  out << footer.dump() << "\n";
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
  out << "seed,game_id,policy,t,l,f";
  for (std::size_t d = 0; d < trace.dims; ++d) out << ",cost_" << d;
  out << ",accepted,utility,regret,cum_regret\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::string(buf);
  };
  for (const auto& r : trace.rounds) {
    out << trace.seed << "," << trace.game_id << "," << trace.policy << "," << r.t << ","
        << r.manipulation.leader_action + 1 << "," << r.manipulation.target + 1;
    for (double c : r.manipulation.cost) out << "," << num(c);
    out << "," << (r.accepted ? 1 : 0) << "," << num(r.leader_utility) << ","
        << num(r.instant_regret) << "," << num(r.cum_regret) << "\n";
  }
}

}  // namespace stackgame

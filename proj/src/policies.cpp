#include "stackgame/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stackgame/omp.hpp"

namespace stackgame {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kStuckTol = 1e-12;

double leader_value(const GameView& view, std::span<const double> payoff, const Vec& cost) {
  Vec net = sub(payoff, cost);
  if (view.leader_model->kind == UtilityKind::CobbDouglas) {
    for (double x : net) {
      if (!(x > 0.0)) return kNegInf;
    }
  }
  return view.leader_utility(net);
}

}  // namespace

PolicySpec PolicySpec::parse(const std::string& name) {
  PolicySpec spec;
  if (name == "nomanip" || name == "no-manipulation") {
    spec.no_manipulation = true;
    return spec;
  }
  auto plus = name.find('+');
  if (plus == std::string::npos)
    throw std::invalid_argument("unknown policy: " + name +
                                " (expected nomanip or <objective>+<acceptance>)");
  std::string obj = name.substr(0, plus);
  std::string acc = name.substr(plus + 1);
  if (obj == "eu") {
    spec.objective = Objective::EU;
  } else if (obj == "longeu") {
    spec.objective = Objective::LongEU;
  } else if (obj == "longeuplus") {
    spec.objective = Objective::LongEUPlus;
  } else {
    throw std::invalid_argument("unknown policy objective: " + obj);
  }
  if (acc == "pfr") {
    spec.acceptance = AcceptanceModel::PFR;
  } else if (acc == "rwmc") {
    spec.acceptance = AcceptanceModel::RWMC;
  } else if (acc == "mwmc") {
    spec.acceptance = AcceptanceModel::MWMC;
  } else {
    throw std::invalid_argument("unknown acceptance model: " + acc);
  }
  return spec;
}

std::string PolicySpec::name() const {
  if (no_manipulation) return "nomanip";
  std::string obj = objective == Objective::EU        ? "eu"
                    : objective == Objective::LongEU  ? "longeu"
                                                      : "longeuplus";
  std::string acc = acceptance == AcceptanceModel::PFR    ? "pfr"
                    : acceptance == AcceptanceModel::RWMC ? "rwmc"
                                                          : "mwmc";
  return obj + "+" + acc;
}

void PolicySpec::validate() const {
  if (no_manipulation) return;
  if (acceptance != AcceptanceModel::PFR && belief_kind != UtilityKind::Linear)
    throw std::invalid_argument("rwmc/mwmc acceptance requires a linear belief model");
}

bool PolicyState::all_brs_known() const {
  return std::all_of(known_brs.begin(), known_brs.end(),
                     [](const auto& br) { return br.has_value(); });
}

void refresh_samples(PolicyState& state, std::size_t n, std::uint64_t seed) {
  state.samples = sample_region(state.region, n, seed);
}

double fallback_utility(const PolicyState& state, const GameView& view, std::size_t l) {
  if (state.known_brs[l])
    return view.leader_utility(view.leader_payoffs->at(l, *state.known_brs[l]));
  auto prob = br_probability(state.region, view, l, state.samples, state.belief_kind);
  double expected = 0.0;
  for (std::size_t f = 0; f < prob.size(); ++f) {
    if (prob[f] > 0.0) expected += prob[f] * view.leader_utility(view.leader_payoffs->at(l, f));
  }
  return expected;
}

double incumbent_value(const PolicyState& state, const GameView& view) {
  if (state.incumbent) return state.incumbent_utility;
  // before any observed outcome: best predicted-BR utility across actions
  double best = kNegInf;
  for (std::size_t l = 0; l < view.leader_actions(); ++l) {
    std::size_t br = state.known_brs[l]
                         ? *state.known_brs[l]
                         : predicted_br(state.region, view, l, state.samples, state.belief_kind);
    best = std::max(best, view.leader_utility(view.leader_payoffs->at(l, br)));
  }
  return best;
}

double eu_value(const PolicyState& state, const GameView& view, const Manipulation& m,
                double p_accept) {
  double u_new = leader_value(view, view.leader_payoffs->at(m.leader_action, m.target), m.cost);
  return u_new * p_accept + fallback_utility(state, view, m.leader_action) * (1.0 - p_accept);
}

double longeu_value(const PolicyState& state, const GameView& view, const Manipulation& m,
                    double p_accept, int t0, int T) {
  double u_new = leader_value(view, view.leader_payoffs->at(m.leader_action, m.target), m.cost);
  double remaining = static_cast<double>(T - t0);
  double fallback = fallback_utility(state, view, m.leader_action);
  double u_best = incumbent_value(state, view);
  return u_new * (remaining + 1.0) * p_accept +
         (fallback + u_best * remaining) * (1.0 - p_accept);
}

double longeu_plus_value(const PolicyState& state, const GameView& view, const Manipulation& m,
                         double p_accept) {
  double u_new = leader_value(view, view.leader_payoffs->at(m.leader_action, m.target), m.cost);
  return (u_new - incumbent_value(state, view)) * p_accept;
}

namespace {

// context computed once per decision round
struct RoundContext {
  std::vector<double> fallback;
  std::vector<std::size_t> predicted;
  double u_best = 0.0;
};

RoundContext make_context(const PolicyState& state, const GameView& view) {
  RoundContext ctx;
  std::size_t n_l = view.leader_actions();
  ctx.fallback.resize(n_l);
  ctx.predicted.resize(n_l);
  double best_predicted = kNegInf;
  for (std::size_t l = 0; l < n_l; ++l) {
    if (state.known_brs[l]) {
      ctx.predicted[l] = *state.known_brs[l];
      ctx.fallback[l] = view.leader_utility(view.leader_payoffs->at(l, ctx.predicted[l]));
    } else {
      auto prob = br_probability(state.region, view, l, state.samples, state.belief_kind);
      ctx.predicted[l] =
          static_cast<std::size_t>(std::max_element(prob.begin(), prob.end()) - prob.begin());
      double expected = 0.0;
      for (std::size_t f = 0; f < prob.size(); ++f) {
        if (prob[f] > 0.0)
          expected += prob[f] * view.leader_utility(view.leader_payoffs->at(l, f));
      }
      ctx.fallback[l] = expected;
    }
    best_predicted =
        std::max(best_predicted, view.leader_utility(view.leader_payoffs->at(l, ctx.predicted[l])));
  }
  ctx.u_best = state.incumbent ? state.incumbent_utility : best_predicted;
  return ctx;
}

// Candidate score centred on replaying the incumbent (whose score is then
// exactly zero). Algebraically this is the objective minus the incumbent's
// objective; the centred form keeps mathematical ties exact in floats, so a
// sure-to-fail probe can never outrank the incumbent by a rounding ulp.
double objective_gain(Objective objective, double u_new, double p, double fallback,
                      double u_best, int t0, int T) {
  switch (objective) {
    case Objective::EU:
      return p * (u_new - u_best) + (1.0 - p) * (fallback - u_best);
    case Objective::LongEU: {
      double rounds = static_cast<double>(T - t0) + 1.0;
      return rounds * p * (u_new - u_best) + (1.0 - p) * (fallback - u_best);
    }
    case Objective::LongEUPlus:
      return p * (u_new - u_best);
  }
  return kNegInf;
}

struct Scored {
  Manipulation m;
  double value = kNegInf;
  double p = 0.0;
  double cost_value = 0.0;
  bool valid = false;
};

// objective value first, then more likely to be accepted, then cheaper in
// leader utility, then lower action indices
bool improves(const Scored& best, const Manipulation& m, double value, double p,
              double cost_value) {
  if (!best.valid) return true;
  if (value != best.value) return value > best.value;
  if (p != best.p) return p > best.p;
  if (cost_value != best.cost_value) return cost_value < best.cost_value;
  if (m.leader_action != best.m.leader_action) return m.leader_action < best.m.leader_action;
  return m.target < best.m.target;
}

// tight single-objective cost for a Cobb-Douglas follower at weight w:
// (x_d + c)^{w_d} must lift the log utility by the log gap
std::optional<double> cd_axis_cost(std::span<const double> payoff, const Weight& w,
                                   double log_gap, std::size_t d) {
  if (w[d] <= 0.0) return std::nullopt;
  double c = payoff[d] * (std::exp(log_gap / w[d]) - 1.0);
  if (!(c >= 0.0) || !std::isfinite(c)) return std::nullopt;
  return c;
}

}  // namespace

std::vector<Manipulation> pfr_candidates(const PolicyState& state, const GameView& view) {
  std::size_t n_l = view.leader_actions();
  std::size_t n_f = view.follower_actions();
  std::size_t dims = view.dims();
  std::vector<Manipulation> out;
  out.reserve(n_l * n_f * (state.samples.size() * dims + 1) + 1);

  for (std::size_t l = 0; l < n_l; ++l) {
    for (std::size_t f = 0; f < n_f; ++f) out.push_back({l, f, Vec(dims, 0.0)});
  }
  if (state.incumbent) out.push_back(*state.incumbent);

  const PayoffTensor& xf = *view.follower_payoffs;
  const PayoffTensor& xl = *view.leader_payoffs;
  bool cd_belief = state.belief_kind == UtilityKind::CobbDouglas;
  bool cd_leader = view.leader_model->kind == UtilityKind::CobbDouglas;

  for (const Weight& w : state.samples) {
    for (std::size_t l = 0; l < n_l; ++l) {
      // follower's ranking of the raw columns under this weight
      double best_u = kNegInf;
      for (std::size_t f = 0; f < n_f; ++f) {
        double u = cd_belief ? [&] {
          double log_u = 0.0;
          auto col = xf.at(l, f);
          for (std::size_t d = 0; d < dims; ++d) log_u += w[d] * std::log(col[d]);
          return log_u;
        }()
                             : dot(w.span(), xf.at(l, f));
        best_u = std::max(best_u, u);
      }
      for (std::size_t f = 0; f < n_f; ++f) {
        auto col = xf.at(l, f);
        auto own = xl.at(l, f);
        if (cd_belief) {
          double log_u = 0.0;
          for (std::size_t d = 0; d < dims; ++d) log_u += w[d] * std::log(col[d]);
          double log_gap = best_u - log_u;
          if (log_gap <= 0.0) continue;
          for (std::size_t d = 0; d < dims; ++d) {
            auto c = cd_axis_cost(col, w, log_gap, d);
            if (!c) continue;
            Vec cost(dims, 0.0);
            cost[d] = *c;
            if (view.constraint == ConstraintMode::C2) {
              cost[d] = std::min(cost[d], std::max(0.0, own[d]));
              // re-check the incentive constraint after clipping
              double log_new = 0.0;
              for (std::size_t k = 0; k < dims; ++k) log_new += w[k] * std::log(col[k] + cost[k]);
              if (log_new < best_u - 1e-12) continue;
            }
            if (cd_leader) {
              bool positive = true;
              for (std::size_t k = 0; k < dims; ++k) {
                if (!(own[k] - cost[k] > 0.0)) positive = false;
              }
              if (!positive) continue;
            }
            out.push_back({l, f, std::move(cost)});
          }
        } else if (view.constraint == ConstraintMode::C1) {
          double gap = best_u - dot(w.span(), col);
          if (gap <= 0.0) continue;
          for (std::size_t d = 0; d < dims; ++d) {
            if (w[d] <= 0.0) continue;
            Vec cost(dims, 0.0);
            cost[d] = gap / w[d];
            out.push_back({l, f, std::move(cost)});
          }
        } else {
          auto cost = minimal_cost_given_weight(view, w, l, f);
          if (cost && !is_zero(*cost)) out.push_back({l, f, std::move(*cost)});
        }
      }
    }
  }
  return out;
}

Manipulation decide_pfr(const PolicyState& state, const GameView& view, int t0, int T,
                        Objective objective) {
  RoundContext ctx = make_context(state, view);
  const Weight& lw = view.leader_model->weight;
  Scored best;
  for (auto& m : pfr_candidates(state, view)) {
    double u_new = leader_value(view, view.leader_payoffs->at(m.leader_action, m.target), m.cost);
    if (u_new == kNegInf) continue;
    double p = accept_probability(state.region, view, m, state.samples, state.belief_kind);
    double value =
        objective_gain(objective, u_new, p, ctx.fallback[m.leader_action], ctx.u_best, t0, T);
    double cost_value = dot(lw.span(), m.cost);
    if (improves(best, m, value, p, cost_value)) best = {std::move(m), value, p, cost_value, true};
  }
  return best.m;
}

namespace {

Weight random_region_weight(const PolicyState& state, Rng& rng) {
  if (state.region.dims() == 2) {
    auto iv = state.region.interval();
    if (iv.width() < kDegenerateWidth) {
      double mid = std::clamp(iv.mid(), 0.0, 1.0);
      return Weight(Vec{mid, 1.0 - mid});
    }
    double w1 = rng.uniform(iv.lo, iv.hi);
    return Weight(Vec{w1, 1.0 - w1});
  }
  if (state.samples.empty()) return Weight::normalized(state.region.interior_point().point);
  return state.samples[rng.below(state.samples.size())];
}

Weight region_centroid(const PolicyState& state) {
  if (state.region.dims() == 2) {
    auto iv = state.region.interval();
    double mid = std::clamp(iv.mid(), 0.0, 1.0);
    return Weight(Vec{mid, 1.0 - mid});
  }
  if (state.samples.empty()) return Weight::normalized(state.region.interior_point().point);
  Vec mean(state.region.dims(), 0.0);
  for (const auto& w : state.samples) {
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += w[d];
  }
  for (double& v : mean) v /= static_cast<double>(state.samples.size());
  return Weight::normalized(std::move(mean));
}

Manipulation incumbent_play(const PolicyState& state, const GameView& view,
                            const RoundContext& ctx) {
  if (state.incumbent) return *state.incumbent;
  std::size_t best_l = 0;
  double best_u = kNegInf;
  for (std::size_t l = 0; l < view.leader_actions(); ++l) {
    double u = view.leader_utility(view.leader_payoffs->at(l, ctx.predicted[l]));
    if (u > best_u) {
      best_u = u;
      best_l = l;
    }
  }
  return {best_l, ctx.predicted[best_l], Vec(view.dims(), 0.0)};
}

}  // namespace

Manipulation decide_rwmc(PolicyState& state, const GameView& view, int t0, int T,
                         Objective objective, bool use_centroid, Rng& rng) {
  Weight w_hat = [&] {
    if (!use_centroid) return random_region_weight(state, rng);
    Weight mid = region_centroid(state);
    // stuck with the same weight after a round without manipulation:
    // randomise until a manipulation is chosen again
    if (state.last_weight && !state.last_explored &&
        linf_distance(mid.span(), state.last_weight->span()) <= kStuckTol)
      return random_region_weight(state, rng);
    return mid;
  }();
  state.last_weight = w_hat;

  RoundContext ctx = make_context(state, view);
  // fallback conditioned on the fixed weight: best response under w_hat
  UtilityModel hat_model{UtilityKind::Linear, w_hat};
  const Weight& lw = view.leader_model->weight;

  Scored explorer;
  for (std::size_t l = 0; l < view.leader_actions(); ++l) {
    std::size_t br_hat = state.known_brs[l]
                             ? *state.known_brs[l]
                             : best_response_under(*view.follower_payoffs, hat_model, l);
    double fallback = view.leader_utility(view.leader_payoffs->at(l, br_hat));
    for (std::size_t f = 0; f < view.follower_actions(); ++f) {
      auto cost = minimal_cost_given_weight(view, w_hat, l, f);
      if (!cost) continue;
      Manipulation m{l, f, std::move(*cost)};
      double u_new = leader_value(view, view.leader_payoffs->at(l, f), m.cost);
      if (u_new == kNegInf) continue;
      // an indifference offer is assumed accepted half the time
      double value = objective_gain(objective, u_new, 0.5, fallback, ctx.u_best, t0, T);
      double cost_value = dot(lw.span(), m.cost);
      if (improves(explorer, m, value, 0.5, cost_value))
        explorer = {std::move(m), value, 0.5, cost_value, true};
    }
  }

  // replaying the incumbent scores exactly zero in the centred objective
  if (!explorer.valid || explorer.value < 0.0) {
    state.last_explored = false;
    return incumbent_play(state, view, ctx);
  }
  state.last_explored = !is_zero(explorer.m.cost);
  return explorer.m;
}

Manipulation no_manipulation_baseline(const PolicyState& state, const GameView& view) {
  std::size_t best_l = 0;
  double best_u = kNegInf;
  for (std::size_t l = 0; l < view.leader_actions(); ++l) {
    if (!state.known_brs[l])
      throw std::logic_error("the no-manipulation baseline needs known best responses");
    double u = view.leader_utility(view.leader_payoffs->at(l, *state.known_brs[l]));
    if (u > best_u) {
      best_u = u;
      best_l = l;
    }
  }
  return {best_l, *state.known_brs[best_l], Vec(view.dims(), 0.0)};
}

Manipulation decide(PolicyState& state, const GameView& view, const PolicySpec& spec, int t0,
                    int T, Rng& rng) {
  if (spec.no_manipulation) return no_manipulation_baseline(state, view);
  if (spec.acceptance == AcceptanceModel::PFR)
    return decide_pfr(state, view, t0, T, spec.objective);
  return decide_rwmc(state, view, t0, T, spec.objective,
                     spec.acceptance == AcceptanceModel::MWMC, rng);
}

double closed_form_2d_cost(const TwoDRowGeometry& geometry, std::size_t objective) {
  if (objective > 1) throw std::invalid_argument("objective index must be 0 or 1");
  double a = objective == 0 ? geometry.alpha : -geometry.alpha;
  double radicand =
      (a + geometry.cost_min[objective]) * (a + geometry.cost_max[objective]);
  if (radicand < 0.0) throw std::domain_error("invalid cost bounds: negative radicand");
  return -a + std::sqrt(radicand);
}

double single_objective_cost(std::span<const double> w, std::span<const double> payoff_gap,
                             std::size_t objective) {
  if (w[objective] <= 0.0)
    throw std::invalid_argument("single-objective cost needs positive weight on the objective");
  return dot(w, payoff_gap) / w[objective];
}

TwoDRowGeometry make_row_geometry(const GameView& view, const FeasibleRegion::Interval& interval,
                                  std::size_t l, std::size_t f, std::size_t br,
                                  double incumbent_utility) {
  auto x = view.follower_payoffs->at(l, br);
  auto y = view.follower_payoffs->at(l, f);
  TwoDRowGeometry geometry;
  geometry.alpha = (y[0] - y[1]) - (x[0] - x[1]);
  Vec gap = sub(x, y);
  Vec w_lo{interval.lo, 1.0 - interval.lo};
  Vec w_hi{interval.hi, 1.0 - interval.hi};
  const Weight& lw = view.leader_model->weight;
  double pair_utility = view.leader_utility(view.leader_payoffs->at(l, f));
  for (std::size_t d = 0; d < 2; ++d) {
    double at_lo = w_lo[d] > 0.0 ? dot(w_lo, gap) / w_lo[d]
                                 : std::numeric_limits<double>::infinity();
    double at_hi = w_hi[d] > 0.0 ? dot(w_hi, gap) / w_hi[d]
                                 : std::numeric_limits<double>::infinity();
    geometry.cost_min[d] = std::max(0.0, std::min(at_lo, at_hi));
    geometry.cost_max[d] = lw[d] > 0.0 ? (pair_utility - incumbent_utility) / lw[d]
                                       : std::numeric_limits<double>::infinity();
  }
  return geometry;
}

}  // namespace stackgame

#include "stackgame/belief.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "stackgame/rng.hpp"

namespace stackgame {

namespace {

constexpr double kStrictShrink = 1e-12;
constexpr double kBetaTol = 1e-15;

void warn_repair(double slack) {
  static std::atomic<int> warned{0};
  if (warned.fetch_add(1) < 3)
    std::fprintf(stderr, "stackgame: belief region numerically empty, relaxed by %.3g\n", slack);
}

// A constraint n.w >= 0 restricted to w = (w1, 1-w1) reads
// alpha + beta*w1 >= 0 with alpha = n2, beta = n1 - n2.
struct IntervalCut {
  double lo = 0.0;
  double hi = 1.0;
  bool empty = false;

  void apply(double alpha, double beta, bool strict) {
    if (std::abs(beta) <= kBetaTol) {
      if (strict ? alpha <= 0.0 : alpha < 0.0) empty = true;
      return;
    }
    double boundary = -alpha / beta;
    if (beta > 0.0) {
      lo = std::max(lo, strict ? boundary + kStrictShrink : boundary);
    } else {
      hi = std::min(hi, strict ? boundary - kStrictShrink : boundary);
    }
    if (lo > hi) empty = true;
  }
};

FeasibleRegion::Interval interval_with_slack(const std::vector<HalfspaceConstraint>& constraints,
                                             double slack) {
  IntervalCut cut;
  for (const auto& c : constraints) cut.apply(c.normal[1] + slack, c.normal[0] - c.normal[1], c.strict);
  if (cut.empty) return {1.0, 0.0};
  return {cut.lo, cut.hi};
}

Vec transform_payoff(UtilityKind kind, std::span<const double> payoff) {
  Vec out(payoff.begin(), payoff.end());
  if (kind == UtilityKind::CobbDouglas) {
    for (double& x : out) {
      if (!(x > 0.0))
        throw std::domain_error("Cobb-Douglas belief requires strictly positive payoffs");
      x = std::log(x);
    }
  }
  return out;
}

// Euclidean projection onto the probability simplex.
Vec project_simplex(Vec x) {
  Vec u = x;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  std::size_t rho = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cumulative += u[i];
    double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (u[i] - candidate > 0.0) {
      rho = i + 1;
      tau = candidate;
    }
  }
  (void)rho;
  for (double& v : x) v = std::max(0.0, v - tau);
  double total = sum(x);
  if (total > 0.0) {
    for (double& v : x) v /= total;
  }
  return x;
}

}  // namespace

FeasibleRegion::FeasibleRegion(std::size_t dims) : dims_(dims) {
  if (dims < 2) throw std::invalid_argument("feasible region needs at least two objectives");
}

FeasibleRegion FeasibleRegion::with(HalfspaceConstraint constraint) const {
  if (constraint.normal.size() != dims_)
    throw std::invalid_argument("constraint normal has the wrong dimension");
  FeasibleRegion next(*this);
  next.constraints_.push_back(std::move(constraint));
  return next;
}

FeasibleRegion::Interval FeasibleRegion::interval() const {
  if (dims_ != 2) throw std::logic_error("interval() is defined for two objectives only");
  Interval iv = interval_with_slack(constraints_, 0.0);
  if (iv.lo <= iv.hi) return iv;
  double slack = 1e-9;
  while (slack < 1.0) {
    iv = interval_with_slack(constraints_, slack);
    if (iv.lo <= iv.hi) {
      warn_repair(slack);
      return iv;
    }
    slack *= 2.0;
  }
  // collapse to the crossing point; exact emptiness cannot happen with a
  // deterministic follower, this is float noise at its worst
  warn_repair(slack);
  iv = interval_with_slack(constraints_, 1.0);
  double mid = std::clamp(0.5 * (iv.lo + iv.hi), 0.0, 1.0);
  return {mid, mid};
}

bool FeasibleRegion::contains(std::span<const double> w, double slack) const {
  for (double x : w) {
    if (x < -slack) return false;
  }
  for (const auto& c : constraints_) {
    if (dot(c.normal, w) < -slack) return false;
  }
  return true;
}

FeasibleRegion::InteriorPoint FeasibleRegion::interior_point() const {
  if (dims_ == 2) {
    Interval iv = interval();
    double mid = iv.mid();
    return {{mid, 1.0 - mid}, 0.0};
  }
  Vec x(dims_, 1.0 / static_cast<double>(dims_));
  std::vector<Vec> normals;
  normals.reserve(constraints_.size());
  for (const auto& c : constraints_) {
    double norm = std::sqrt(dot(c.normal, c.normal));
    if (norm <= 0.0) continue;
    Vec unit(c.normal);
    for (double& v : unit) v /= norm;
    normals.push_back(std::move(unit));
  }
  auto min_slack = [&](const Vec& p) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& n : normals) s = std::min(s, dot(n, p));
    for (double v : p) s = std::min(s, v);
    return s;
  };
  // projected subgradient ascent on the worst constraint margin
  double best_slack = min_slack(x);
  Vec best = x;
  for (int iter = 0; iter < 2000 && best_slack < 1e-7; ++iter) {
    const Vec* worst = nullptr;
    double worst_value = std::numeric_limits<double>::infinity();
    std::size_t worst_axis = dims_;
    for (const auto& n : normals) {
      double v = dot(n, x);
      if (v < worst_value) {
        worst_value = v;
        worst = &n;
        worst_axis = dims_;
      }
    }
    for (std::size_t d = 0; d < dims_; ++d) {
      if (x[d] < worst_value) {
        worst_value = x[d];
        worst = nullptr;
        worst_axis = d;
      }
    }
    double step = 0.25 / (1.0 + iter / 100.0);
    Vec moved = x;
    if (worst) {
      for (std::size_t d = 0; d < dims_; ++d) moved[d] += step * (*worst)[d];
    } else if (worst_axis < dims_) {
      moved[worst_axis] += step;
    }
    x = project_simplex(std::move(moved));
    double s = min_slack(x);
    if (s > best_slack) {
      best_slack = s;
      best = x;
    }
  }
  if (best_slack >= 0.0) return {best, 0.0};
  // offset relaxation, doubling from 1e-9
  double slack = 1e-9;
  while (slack < 1.0 && best_slack < -slack) slack *= 2.0;
  if (best_slack < -1.0) throw std::runtime_error("degenerate belief region: no interior point");
  warn_repair(slack);
  return {best, slack};
}

HalfspaceConstraint constraint_from_comparison(const Comparison& comparison,
                                               UtilityKind model_kind) {
  Vec a = transform_payoff(model_kind, comparison.preferred);
  Vec b = transform_payoff(model_kind, comparison.other);
  if (comparison.outcome) return {sub(a, b), false};
  return {sub(b, a), true};
}

FeasibleRegion region_from_history(std::span<const Comparison> history, UtilityKind model_kind,
                                   std::size_t dims) {
  FeasibleRegion region(dims);
  for (const auto& comparison : history)
    region = region.with(constraint_from_comparison(comparison, model_kind));
  return region;
}

std::vector<Weight> sample_region(const FeasibleRegion& region, std::size_t n,
                                  std::uint64_t seed, const SampleParams& params) {
  std::vector<Weight> samples;
  if (n == 0) return samples;
  samples.reserve(n);
  if (region.dims() == 2) {
    auto iv = region.interval();
    if (iv.width() < kDegenerateWidth) {
      double mid = std::clamp(iv.mid(), 0.0, 1.0);
      for (std::size_t i = 0; i < n; ++i) samples.emplace_back(Vec{mid, 1.0 - mid});
      return samples;
    }
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      double w1 = rng.uniform(iv.lo, iv.hi);
      samples.emplace_back(Vec{w1, 1.0 - w1});
    }
    return samples;
  }

  // hit-and-run over the simplex slice
  auto start = region.interior_point();
  double slack = std::max(start.slack, 1e-12);
  const auto& constraints = region.constraints();
  std::size_t dims = region.dims();
  Rng rng(seed);
  Vec x = start.point;
  Vec direction(dims);
  std::size_t produced = 0;
  std::size_t step_index = 0;
  while (produced < n) {
    // random direction inside the sum-zero hyperplane
    double mean = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      direction[d] = rng.normal();
      mean += direction[d];
    }
    mean /= static_cast<double>(dims);
    double norm = 0.0;
    for (std::size_t d = 0; d < dims; ++d) {
      direction[d] -= mean;
      norm += direction[d] * direction[d];
    }
    norm = std::sqrt(norm);
    if (norm < 1e-12) continue;
    for (double& v : direction) v /= norm;

    double t_lo = -std::numeric_limits<double>::infinity();
    double t_hi = std::numeric_limits<double>::infinity();
    auto cut = [&](double value, double rate) {
      // value + t*rate >= 0
      if (rate > 1e-15) {
        t_lo = std::max(t_lo, -value / rate);
      } else if (rate < -1e-15) {
        t_hi = std::min(t_hi, -value / rate);
      }
    };
    for (std::size_t d = 0; d < dims; ++d) cut(x[d], direction[d]);
    for (const auto& c : constraints) cut(dot(c.normal, x) + slack, dot(c.normal, direction));

    if (t_hi > t_lo) {
      double t = rng.uniform(t_lo, t_hi);
      for (std::size_t d = 0; d < dims; ++d) x[d] = std::max(0.0, x[d] + t * direction[d]);
      double total = sum(x);
      for (double& v : x) v /= total;
    }
    ++step_index;
    if (step_index > params.burn_in && (step_index - params.burn_in) % params.thinning == 0) {
      samples.emplace_back(Weight::normalized(x));
      ++produced;
    }
  }
  return samples;
}

Weight centroid(const FeasibleRegion& region, std::uint64_t seed) {
  if (region.dims() == 2) {
    auto iv = region.interval();
    double mid = std::clamp(iv.mid(), 0.0, 1.0);
    return Weight(Vec{mid, 1.0 - mid});
  }
  auto samples = sample_region(region, 512, seed);
  Vec mean(region.dims(), 0.0);
  for (const auto& w : samples) {
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += w[d];
  }
  for (double& v : mean) v /= static_cast<double>(samples.size());
  return Weight::normalized(std::move(mean));
}

namespace {

// linear coefficients of u_w(a) - u_w(b) as a function of w1 (two objectives)
void ineq_coefficients(std::span<const double> a, std::span<const double> b, double& alpha,
                       double& beta) {
  alpha = a[1] - b[1];
  beta = (a[0] - b[0]) - (a[1] - b[1]);
}

// mirrors the simulated follower's acceptance rule, indifference included
bool sample_accepts(std::span<const double> w, const Vec& offer,
                    const std::vector<Vec>& columns) {
  double u_offer = dot(w, offer);
  for (const auto& col : columns) {
    if (u_offer < dot(w, col) - kAcceptSlack) return false;
  }
  return true;
}

std::vector<Vec> transformed_columns(const GameView& view, std::size_t l, UtilityKind kind) {
  std::vector<Vec> columns;
  columns.reserve(view.follower_actions());
  for (std::size_t f = 0; f < view.follower_actions(); ++f) {
    Vec col(view.follower_payoffs->at(l, f).begin(), view.follower_payoffs->at(l, f).end());
    if (kind == UtilityKind::CobbDouglas) {
      for (double& x : col) {
        if (!(x > 0.0))
          throw std::domain_error("Cobb-Douglas belief requires strictly positive payoffs");
        x = std::log(x);
      }
    }
    columns.push_back(std::move(col));
  }
  return columns;
}

}  // namespace

double accept_probability_mc(const GameView& view, const Manipulation& m,
                             std::span<const Weight> samples, UtilityKind belief_kind) {
  if (samples.empty()) return 0.0;
  Vec manipulated = add(view.follower_payoffs->at(m.leader_action, m.target), m.cost);
  Vec offer = belief_kind == UtilityKind::CobbDouglas
                  ? [&] {
                      Vec v = manipulated;
                      for (double& x : v) {
                        if (!(x > 0.0))
                          throw std::domain_error(
                              "Cobb-Douglas belief requires strictly positive payoffs");
                        x = std::log(x);
                      }
                      return v;
                    }()
                  : manipulated;
  auto columns = transformed_columns(view, m.leader_action, belief_kind);
  std::size_t accepted = 0;
  for (const auto& w : samples) {
    if (sample_accepts(w.span(), offer, columns)) ++accepted;
  }
  return static_cast<double>(accepted) / static_cast<double>(samples.size());
}

double accept_probability(const FeasibleRegion& region, const GameView& view,
                          const Manipulation& m, std::span<const Weight> samples,
                          UtilityKind belief_kind) {
  if (region.dims() != 2) return accept_probability_mc(view, m, samples, belief_kind);

  Vec manipulated = add(view.follower_payoffs->at(m.leader_action, m.target), m.cost);
  Vec offer = manipulated;
  if (belief_kind == UtilityKind::CobbDouglas) {
    for (double& x : offer) {
      if (!(x > 0.0))
        throw std::domain_error("Cobb-Douglas belief requires strictly positive payoffs");
      x = std::log(x);
    }
  }
  auto columns = transformed_columns(view, m.leader_action, belief_kind);
  auto iv = region.interval();
  if (iv.width() < kDegenerateWidth) {
    Vec w{iv.mid(), 1.0 - iv.mid()};
    return sample_accepts(w, offer, columns) ? 1.0 : 0.0;
  }
  IntervalCut cut;
  cut.lo = iv.lo;
  cut.hi = iv.hi;
  for (const auto& col : columns) {
    double alpha = 0.0;
    double beta = 0.0;
    ineq_coefficients(offer, col, alpha, beta);
    cut.apply(alpha, beta, false);
  }
  if (cut.empty) return 0.0;
  return std::clamp((cut.hi - cut.lo) / iv.width(), 0.0, 1.0);
}

std::vector<double> br_probability(const FeasibleRegion& region, const GameView& view,
                                   std::size_t l, std::span<const Weight> samples,
                                   UtilityKind belief_kind) {
  std::size_t n_f = view.follower_actions();
  std::vector<double> prob(n_f, 0.0);
  auto columns = transformed_columns(view, l, belief_kind);

  if (region.dims() == 2) {
    auto iv = region.interval();
    auto argmax_at = [&](double w1) {
      Vec w{w1, 1.0 - w1};
      std::size_t best = 0;
      double best_u = dot(w, columns[0]);
      for (std::size_t f = 1; f < n_f; ++f) {
        double u = dot(w, columns[f]);
        if (u > best_u) {
          best_u = u;
          best = f;
        }
      }
      return best;
    };
    if (iv.width() < kDegenerateWidth) {
      prob[argmax_at(iv.mid())] = 1.0;
      return prob;
    }
    double total = 0.0;
    for (std::size_t f = 0; f < n_f; ++f) {
      IntervalCut cut;
      cut.lo = iv.lo;
      cut.hi = iv.hi;
      for (std::size_t other = 0; other < n_f; ++other) {
        if (other == f) continue;
        double alpha = 0.0;
        double beta = 0.0;
        ineq_coefficients(columns[f], columns[other], alpha, beta);
        // lower index wins ties, so beating an earlier column is strict
        cut.apply(alpha, beta, other < f);
        if (cut.empty) break;
      }
      if (!cut.empty) prob[f] = std::max(0.0, cut.hi - cut.lo);
      total += prob[f];
    }
    if (total <= 0.0) {
      prob.assign(n_f, 0.0);
      prob[argmax_at(iv.mid())] = 1.0;
      return prob;
    }
    for (double& p : prob) p /= total;
    return prob;
  }

  if (samples.empty()) throw std::invalid_argument("br_probability needs samples above 2 objectives");
  for (const auto& w : samples) {
    std::size_t best = 0;
    double best_u = dot(w.span(), columns[0]);
    for (std::size_t f = 1; f < n_f; ++f) {
      double u = dot(w.span(), columns[f]);
      if (u > best_u) {
        best_u = u;
        best = f;
      }
    }
    prob[best] += 1.0;
  }
  for (double& p : prob) p /= static_cast<double>(samples.size());
  return prob;
}

std::size_t predicted_br(const FeasibleRegion& region, const GameView& view, std::size_t l,
                         std::span<const Weight> samples, UtilityKind belief_kind) {
  auto prob = br_probability(region, view, l, samples, belief_kind);
  return static_cast<std::size_t>(
      std::max_element(prob.begin(), prob.end()) - prob.begin());
}

bool informative(const GameView& view, const Manipulation& m, std::size_t br_action) {
  Vec manipulated = add(view.follower_payoffs->at(m.leader_action, m.target), m.cost);
  auto br_payoff = view.follower_payoffs->at(m.leader_action, br_action);
  bool higher = false;
  bool lower = false;
  for (std::size_t d = 0; d < manipulated.size(); ++d) {
    if (manipulated[d] > br_payoff[d]) higher = true;
    if (manipulated[d] < br_payoff[d]) lower = true;
  }
  return higher && lower;
}

bool informative(const FeasibleRegion& region, const GameView& view, const Manipulation& m,
                 std::span<const Weight> samples, UtilityKind belief_kind) {
  return informative(view, m,
                     predicted_br(region, view, m.leader_action, samples, belief_kind));
}

}  // namespace stackgame

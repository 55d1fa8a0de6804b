#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stackgame/game.hpp"

namespace stackgame {

// One pairwise observation: outcome=true means the follower weakly prefers
// `preferred` over `other`; outcome=false means strictly the opposite.
struct Comparison {
  Vec preferred;
  Vec other;
  bool outcome = true;
};

// Halfspace normal.w >= 0 (or > 0 when strict) over the weight simplex.
struct HalfspaceConstraint {
  Vec normal;
  bool strict = false;
};

// regions narrower than this behave as a single point
inline constexpr double kDegenerateWidth = 1e-6;

// Set of follower weights consistent with the observed comparisons: the
// intersection of homogeneous halfspaces with the unit simplex. Immutable;
// adding a constraint returns a new region.
class FeasibleRegion {
 public:
  explicit FeasibleRegion(std::size_t dims);

  FeasibleRegion with(HalfspaceConstraint constraint) const;

  std::size_t dims() const { return dims_; }
  const std::vector<HalfspaceConstraint>& constraints() const { return constraints_; }

  struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
  };
  // Exact projection to the first weight component (two objectives only).
  // Numerically empty intersections are repaired by relaxing all constraint
  // offsets, doubling the slack from 1e-9 until the interval is nonempty.
  Interval interval() const;

  bool contains(std::span<const double> w, double slack = 0.0) const;

  // Any point of the region's relative interior (any dimension). Falls back
  // to the same offset-relaxation repair when the region is numerically
  // empty; throws std::runtime_error when no point can be recovered at all.
  struct InteriorPoint {
    Vec point;
    double slack = 0.0;  // effective constraint relaxation, 0 when clean
  };
  InteriorPoint interior_point() const;

 private:
  std::size_t dims_;
  std::vector<HalfspaceConstraint> constraints_;
};

// Builds the region implied by a comparison history. Linear utilities use
// payoff differences as normals; Cobb-Douglas comparisons are log-linearised
// (requires strictly positive payoffs).
FeasibleRegion region_from_history(std::span<const Comparison> history, UtilityKind model_kind,
                                   std::size_t dims);
HalfspaceConstraint constraint_from_comparison(const Comparison& comparison,
                                               UtilityKind model_kind);

struct SampleParams {
  std::size_t burn_in = 100;
  std::size_t thinning = 5;
};

// Approximately uniform weights from the region. Two objectives reduce to
// uniform draws from the exact interval (n midpoint copies when the interval
// is degenerate); higher dimensions run hit-and-run over the constrained
// simplex slice.
std::vector<Weight> sample_region(const FeasibleRegion& region, std::size_t n,
                                  std::uint64_t seed, const SampleParams& params = {});

// Interval midpoint for two objectives, sample mean otherwise.
Weight centroid(const FeasibleRegion& region, std::uint64_t seed);

// Probability (under a uniform weight over the region) that the follower
// takes the offer, evaluating the best response per weight. Exact interval
// geometry for two objectives, Monte Carlo over `samples` otherwise.
double accept_probability(const FeasibleRegion& region, const GameView& view,
                          const Manipulation& m, std::span<const Weight> samples,
                          UtilityKind belief_kind = UtilityKind::Linear);

// Monte-Carlo estimate regardless of dimension (the exact two-objective
// route's cross-check).
double accept_probability_mc(const GameView& view, const Manipulation& m,
                             std::span<const Weight> samples,
                             UtilityKind belief_kind = UtilityKind::Linear);

// Per follower action, the probability of being the best response to l under
// a uniform region weight; entries sum to one.
std::vector<double> br_probability(const FeasibleRegion& region, const GameView& view,
                                   std::size_t l, std::span<const Weight> samples,
                                   UtilityKind belief_kind = UtilityKind::Linear);

std::size_t predicted_br(const FeasibleRegion& region, const GameView& view, std::size_t l,
                         std::span<const Weight> samples,
                         UtilityKind belief_kind = UtilityKind::Linear);

// An offer is informative when the manipulated payoff beats the best
// response's payoff in at least one objective and loses in at least one, so
// either follower reaction cuts the region.
bool informative(const GameView& view, const Manipulation& m, std::size_t br_action);
bool informative(const FeasibleRegion& region, const GameView& view, const Manipulation& m,
                 std::span<const Weight> samples,
                 UtilityKind belief_kind = UtilityKind::Linear);

}  // namespace stackgame

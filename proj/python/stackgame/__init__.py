"""Repeated two-player multi-objective Stackelberg games with payoff manipulation.

Thin wrapper over the C++ core. Action indices are 0-based in this API;
game files, traces and the CLI print them 1-based.
"""

from ._core import (
    ConstraintMode,
    Game,
    Manipulation,
    OmpSolution,
    RoundRecord,
    SummaryRow,
    Trace,
    TwoDRowGeometry,
    UtilityKind,
    best_response,
    brute_force_omp,
    closed_form_2d_cost,
    cumulative_regret,
    fixed_game,
    follower_respond,
    game_from_json,
    generate_uniform_game,
    load_game,
    minimal_cost_given_weight,
    play_safe_cost,
    run_episode,
    run_experiment,
    save_game,
    solve_omp,
)

__all__ = [
    "ConstraintMode",
    "Game",
    "Manipulation",
    "OmpSolution",
    "RoundRecord",
    "SummaryRow",
    "Trace",
    "TwoDRowGeometry",
    "UtilityKind",
    "best_response",
    "brute_force_omp",
    "closed_form_2d_cost",
    "cumulative_regret",
    "fixed_game",
    "follower_respond",
    "game_from_json",
    "generate_uniform_game",
    "load_game",
    "minimal_cost_given_weight",
    "play_safe_cost",
    "run_episode",
    "run_experiment",
    "save_game",
    "solve_omp",
]

__version__ = "0.1.0"

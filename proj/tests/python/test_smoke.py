"""Smoke tests for the python bindings."""

import json

import pytest

import stackgame as sg


def test_fixed_game_solves_to_published_values():
    hr = sg.fixed_game("high-risk")
    s = sg.solve_omp(hr)
    assert s.manipulation.leader_action == 1
    assert s.manipulation.target == 1
    assert s.leader_utility == pytest.approx(1.4, abs=1e-9)
    assert s.manipulation.cost[0] == pytest.approx(0.4, abs=1e-9)
    assert s.beneficial

    ps = sg.fixed_game("play-safe")
    assert sg.solve_omp(ps).leader_utility == pytest.approx(1.625, abs=1e-9)


def test_best_response_and_follower():
    hr = sg.fixed_game("high-risk")
    assert sg.best_response(hr, 0) == 0
    m = sg.Manipulation(leader_action=0, target=1, cost=[0.4, 0.0])
    assert sg.follower_respond(hr, m) == 1


def test_play_safe_cost():
    ps = sg.fixed_game("play-safe")
    assert sg.play_safe_cost(ps, 1, 1) == pytest.approx([0.5, 0.5])


def test_minimal_cost_given_weight():
    hr = sg.fixed_game("high-risk")
    cost = sg.minimal_cost_given_weight(hr, [0.8, 0.2], 1, 1)
    assert cost == pytest.approx([0.4, 0.0], abs=1e-9)


def test_brute_force_tracks_the_solver():
    g = sg.generate_uniform_game(2, 2, 2, sg.ConstraintMode.C2, sg.UtilityKind.LINEAR, 7)
    exact = sg.solve_omp(g).leader_utility
    grid = sg.brute_force_omp(g, 0.01).leader_utility
    assert abs(exact - grid) <= 0.02


def test_nomanip_episode_regret():
    hr = sg.fixed_game("high-risk")
    trace = sg.run_episode(hr, "nomanip", T=40, seed=1)
    assert len(trace.rounds) == 40
    assert sg.cumulative_regret(trace) == pytest.approx(16.0, abs=1e-9)


def test_episodes_are_deterministic():
    hr = sg.fixed_game("high-risk")
    a = sg.run_episode(hr, "longeu+mwmc", T=20, seed=5)
    b = sg.run_episode(hr, "longeu+mwmc", T=20, seed=5)
    assert a.to_jsonl() == b.to_jsonl()
    c = sg.run_episode(hr, "longeu+mwmc", T=20, seed=6)
    assert a.to_jsonl() != c.to_jsonl()


def test_trace_serialisations_parse():
    hr = sg.fixed_game("high-risk")
    trace = sg.run_episode(hr, "longeu+pfr", T=5, seed=1)
    lines = trace.to_jsonl().strip().split("\n")
    assert len(lines) == 7  # header + 5 rounds + summary
    header = json.loads(lines[0])
    assert header["policy"] == "longeu+pfr"
    assert header["reference_utility"] == pytest.approx(1.4)
    csv = trace.to_csv().strip().split("\n")
    assert csv[0].startswith("seed,game_id,policy,t,l,f,cost_0")
    assert len(csv) == 6


def test_generator_shapes():
    g = sg.generate_uniform_game(3, 2, 4, sg.ConstraintMode.C1, sg.UtilityKind.LINEAR, 11)
    assert g.dims == 3
    assert g.leader_actions == 2
    assert g.follower_actions == 4
    assert sum(g.follower_weight) == pytest.approx(1.0, abs=1e-9)


def test_game_json_round_trip(tmp_path):
    g = sg.fixed_game("play-safe")
    path = str(tmp_path / "game.json")
    sg.save_game(g, path)
    loaded = sg.load_game(path)
    assert loaded.to_json() == g.to_json()


def test_closed_form_cost():
    geometry = sg.TwoDRowGeometry(alpha=0.6, cost_min=[0.0, 0.0], cost_max=[0.4, 0.0])
    assert sg.closed_form_2d_cost(geometry, 0) == pytest.approx(0.174596669, abs=1e-6)


def test_run_experiment_from_config():
    config = {
        "generator": "high-risk",
        "constraint": "c1",
        "policies": ["nomanip"],
        "horizons": [40],
        "replications": 1,
        "seed": 1,
    }
    rows = sg.run_experiment(json.dumps(config))
    assert len(rows) == 1
    assert rows[0].mean_final_cr == pytest.approx(16.0, abs=1e-9)
    assert rows[0].se_final_cr == 0.0


def test_policy_validation_errors():
    hr = sg.fixed_game("high-risk")
    with pytest.raises(ValueError):
        sg.run_episode(hr, "warp+drive", T=5)
    with pytest.raises(ValueError):
        sg.run_episode(hr, "longeu+mwmc", T=5, belief="cobb-douglas")

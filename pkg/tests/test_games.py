"""Game construction, solving, exports, and the checking pipeline."""

import json
import random

import pytest

from hflcheck.errors import BudgetError, GameLimitError
from hflcheck.games import (
    EXISTS,
    FORALL,
    WIN_A,
    WIN_E,
    build_game,
    check_via_games,
    export_game,
    game_size_bound,
    solve,
    topological_order,
)
from hflcheck.lts import gen_chain, gen_word_lts, make_lts
from hflcheck.semantics import eliminate_fixpoints, holds
from hflcheck.syntax import (
    App,
    Dia,
    Lam,
    Mu,
    Neg,
    Or,
    Prop,
    Var,
    desugar_vec,
    ff,
    tt,
)
from hflcheck.types import PR, Arrow, Variance

import oracles
import randgen

Z = Variance.ZERO


def test_prop_terminal():
    lts = make_lts(1, [], [(0, "q")])
    game = build_game(lts, 0, Prop("q"))
    assert game.node_count == 1
    assert game.kinds[game.start] == WIN_E
    game = build_game(lts, 0, Prop("p"))
    assert game.kinds[game.start] == WIN_A


def test_stuck_diamond_loses_for_proponent():
    lts = gen_chain(1)  # deadlocked single state
    game = build_game(lts, 0, Dia("a", tt()))
    assert game.node_count == 1
    assert game.kinds[game.start] == WIN_A
    # and the dual stuck box wins for the proponent
    game = build_game(lts, 0, Neg(Dia("a", tt())))
    assert game.kinds[game.start] == WIN_E


def test_solve_trivial():
    lts = make_lts(1, [], [(0, "q")])
    assert solve(build_game(lts, 0, Prop("q"))).winner == EXISTS


def test_opponent_picks_losing_branch():
    # !(q | p) at a state where q holds but p does not: opponent picks !q? no,
    # picks the refutable side; here q holds so !q loses, !p wins for them
    lts = make_lts(1, [], [(0, "q")])
    game = build_game(lts, 0, Neg(Or(Prop("q"), Prop("p"))))
    assert game.kinds[game.start] == FORALL
    assert solve(game).winner == FORALL


def test_game_requires_fixpoint_free_ground():
    lts = gen_chain(2)
    with pytest.raises(ValueError):
        build_game(lts, 0, Mu("X", PR, Var("X")))
    with pytest.raises(ValueError):
        build_game(lts, 0, Lam("X", Z, PR, Var("X")))


def test_game_limit_carries_estimate():
    lts = make_lts(2, [(0, "a", 1), (1, "a", 0)], [(0, "q")])
    phi = App(Lam("F", Z, Arrow(PR, Z, PR), App(Var("F"), Prop("q"))),
              Lam("X", Z, PR, Dia("a", Var("X"))))
    with pytest.raises(GameLimitError) as err:
        build_game(lts, 0, phi, limit=3)
    assert err.value.estimate >= err.value.limit


def test_check_via_games_examples():
    lts = make_lts(3, [(0, "a", 1), (1, "a", 2)], [(2, "q")])
    phi = Mu("X", PR, Or(Prop("q"), Dia("a", Var("X"))))
    assert check_via_games(lts, 0, phi) is True
    assert check_via_games(gen_chain(1), 0, tt()) is True
    assert check_via_games(gen_chain(1), 0, ff()) is False


def test_check_via_games_buffer_single_out():
    from hflcheck.encodings import buffer_formula

    word = ("out",)
    got = check_via_games(gen_word_lts(word), 0, buffer_formula())
    assert got == oracles.buffer_oracle(word)


def test_solved_game_assigns_every_node():
    rng = random.Random(6)
    for _ in range(50):
        lts = randgen.random_lts(rng, 2)
        phi = randgen.random_hfl_formula(rng, randgen.HoGenConfig(max_depth=3))
        try:
            flat = eliminate_fixpoints(desugar_vec(phi), lts, 64)
            game = build_game(lts, 0, flat, 10**5)
        except BudgetError:
            continue
        sol = solve(game)
        assert all(w in (EXISTS, FORALL) for w in sol.winners)
        topological_order(game)  # acyclic


def test_strategy_replay_fuzz():
    rng = random.Random(7)
    games_done = 0
    while games_done < 60:
        lts = randgen.random_lts(rng, 2)
        phi = randgen.random_hfl_formula(rng, randgen.HoGenConfig(max_depth=3))
        try:
            flat = eliminate_fixpoints(desugar_vec(phi), lts, 64)
            game = build_game(lts, 0, flat, 10**5)
        except BudgetError:
            continue
        sol = solve(game)
        own = EXISTS if sol.winner == EXISTS else FORALL
        for _ in range(10):
            node = game.start
            while game.kinds[node] not in (WIN_E, WIN_A):
                if game.kinds[node] == own:
                    node = sol.strategy[node]
                else:
                    node = rng.choice(game.edges[node])
            won_by = EXISTS if game.kinds[node] == WIN_E else FORALL
            assert won_by == sol.winner
        games_done += 1


def test_game_agrees_with_eval_random():
    rng = random.Random(8)
    agree = 0
    while agree < 200:
        lts = randgen.random_lts(rng, 3)
        phi = randgen.random_hfl_formula(rng, randgen.HoGenConfig(max_depth=4))
        state = rng.randrange(lts.n)
        try:
            via_games = check_via_games(lts, state, phi, game_limit=10**6,
                                        unfold_budget=600)
        except BudgetError:
            continue
        assert via_games == holds(lts, state, phi)
        agree += 1


def test_monolithic_matches_decomposed():
    rng = random.Random(9)
    done = 0
    while done < 80:
        lts = randgen.random_lts(rng, 2)
        phi = randgen.random_hfl_formula(rng, randgen.HoGenConfig(max_depth=3))
        try:
            flat = eliminate_fixpoints(desugar_vec(phi), lts, 64)
            g1 = build_game(lts, 0, flat, 10**5)
            g2 = build_game(lts, 0, flat, 10**5, monolithic=True)
        except BudgetError:
            continue
        assert solve(g1).winner == solve(g2).winner
        done += 1


def test_size_bound_convention_k1():
    # at order 1 the leading type-count factor degrades to the arity
    assert game_size_bound(2, 3, 1, 1, 0) == 4 * 4 * 9 * (1 * 4) ** 2
    assert game_size_bound(2, 3, 0, 0, 0) == 4 * 4 * 9


def test_export_dot_single_node():
    lts = make_lts(1, [], [(0, "q")])
    game = build_game(lts, 0, Prop("q"))
    dot = export_game(game, "dot")
    assert dot.startswith("digraph")
    assert dot.count("n0") >= 1


def test_export_json_winners_and_counts():
    lts = make_lts(2, [(0, "a", 1)], [(1, "q")])
    game = build_game(lts, 0, Dia("a", Prop("q")))
    sol = solve(game)
    doc = json.loads(export_game(game, "json", sol))
    assert doc["schema"] == "hflcheck-game-v1"
    assert len(doc["nodes"]) == game.node_count
    assert len(doc["edges"]) == game.edge_count
    assert all(n["winner"] in (EXISTS, FORALL) for n in doc["nodes"])
    assert doc["winner"] == EXISTS


def test_export_json_deterministic():
    lts = make_lts(2, [(0, "a", 1), (0, "a", 0)], [(1, "q")])
    phi = Or(Dia("a", Prop("q")), Prop("p"))
    one = export_game(build_game(lts, 0, phi), "json", solve(build_game(lts, 0, phi)))
    two = export_game(build_game(lts, 0, phi), "json", solve(build_game(lts, 0, phi)))
    assert one == two

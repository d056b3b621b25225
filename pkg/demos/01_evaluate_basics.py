"""First steps: parse a formula, evaluate it, cross-check with the game.

A three-state traffic light cycles red -> green -> yellow -> red.  We ask
the classic reachability question ("can we reach a green state?") with a
least fixpoint, then run the same check through fixpoint elimination and
the reachability game to show both roads agree.
"""

from hflcheck import (
    check_via_games,
    evaluate,
    holds,
    parse_formula,
    print_formula,
    typecheck,
)
from hflcheck.lts import make_lts
from hflcheck.types import format_type

light = make_lts(
    3,
    [(0, "go", 1), (1, "caution", 2), (2, "stop", 0)],
    [(0, "red"), (1, "green"), (2, "yellow")],
)

reach_green = parse_formula("mu (X:Pr). green | <go> X | <caution> X | <stop> X")
print("formula:", print_formula(reach_green))
print("type:   ", format_type(typecheck(reach_green)))

value = evaluate(light, reach_green)
print("denotation (states that can reach green):", sorted(value.states()))

for state in range(light.n):
    direct = holds(light, state, reach_green)
    via_game = check_via_games(light, state, reach_green)
    print(f"state {state}: direct={direct} game={via_game}")
    assert direct == via_game

print("\nboth decision procedures agree on every state")

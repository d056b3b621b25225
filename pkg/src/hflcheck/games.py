"""Reachability games for fixpoint-free formulas, and the full pipeline.

A configuration node asserts that a state belongs to the current formula's
value applied to the argument stack.  Disjunctions and diamonds branch for
the proponent, their negations for the opponent; an application runs a
short protocol: the proponent guesses the argument's value as a table,
then the opponent either pushes the guess and continues with the function
or challenges the guess pointwise by picking arguments, a state, and a
polarity.  The opponent's tuple choice is decomposed into a chain of
single choices, which preserves winners because every link belongs to the
opponent.  Terminals are classified by the literal winning conditions,
including stuck modalities.  Every move strictly shrinks the formula, so
the graph is a DAG and backward induction solves it in one pass.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

from . import denote, surface, syntax
from .denote import enumerate_lattice, index_of
from .errors import GameLimitError, InternalError
from .lts import Lts
from .semantics import eliminate_fixpoints
from .syntax import App, Dia, Formula, Lam, Mu, MuVec, Neg, Or, Prop, Var
from .types import EMPTY_CONTEXT, PrType, fragment, infer, tower, uncurry

EXISTS = "exists"
FORALL = "forall"
WIN_E = "win_exists"
WIN_A = "win_forall"

DEFAULT_GAME_LIMIT = 10**7


@dataclass
class Game:
    kinds: list
    payloads: list
    edges: list
    start: int
    lts: Lts

    @property
    def node_count(self):
        return len(self.kinds)

    @property
    def edge_count(self):
        return sum(len(e) for e in self.edges)


@dataclass
class Solution:
    winner: str  # EXISTS or FORALL
    winners: list  # per node
    strategy: dict  # node -> chosen successor, total on the winner's nodes


def game_size_bound(n: int, size: int, k: int, m: int, v: int) -> int:
    """Closed-form size bound for games of (order k, arity m) formulas."""
    base = 4 * n * n * size * size
    if k == 0:
        return base
    if k == 1:
        factor = m
    else:
        factor = m ** ((k - 1) * m ** (k - 2))
    t = factor * tower(n * (k - 1 + m) ** (k - 1), k)
    return base * t ** (2 * (m + v))


def size_bound_for(phi: Formula, lts: Lts) -> int:
    """The bound above instantiated with the formula's own measures."""
    size, v = syntax.measures(phi)
    k, m = fragment(phi)
    return game_size_bound(lts.n, size, k, m, v)


class _Builder:
    def __init__(self, lts, phi, limit, enum_limit, monolithic):
        self.lts = lts
        self.phi = phi
        self.limit = limit
        self.enum_limit = enum_limit
        self.monolithic = monolithic
        for f in syntax.iter_nodes(phi):
            if isinstance(f, (Mu, MuVec)):
                raise ValueError(
                    "game construction needs a fixpoint-free formula"
                )
        self.types: dict = {}
        top = infer(EMPTY_CONTEXT, phi, types_out=self.types)
        if not isinstance(top, PrType):
            raise ValueError("game construction needs a formula of ground type")
        self.negs: dict = {}
        self.enums: dict = {}
        self.kinds: list = []
        self.payloads: list = []
        self.edges: list = []
        self.index: dict = {}
        self.pending: list = []
        self.used = 0

    def neg_of(self, f: Formula) -> Formula:
        got = self.negs.get(id(f))
        if got is None:
            got = Neg(f)
            self.negs[id(f)] = got
            self.types[id(got)] = self.types[id(f)]
        return got

    def domain(self, ty):
        got = self.enums.get(ty)
        if got is None:
            got = list(enumerate_lattice(ty, self.lts.n, self.enum_limit))
            self.enums[ty] = got
        return got

    def charge(self):
        self.used += 1
        if self.used > self.limit:
            raise GameLimitError(self.used, self.limit,
                                 size_bound_for(self.phi, self.lts))

    def new_node(self, kind, payload, key):
        idx = len(self.kinds)
        self.kinds.append(kind)
        self.payloads.append(payload)
        self.edges.append([])
        self.index[key] = idx
        self.charge()
        return idx

    def add_edge(self, u, v):
        self.edges[u].append(v)
        self.charge()

    def config(self, state, stack, env, f):
        fvs = syntax.free_vars(f)
        items = tuple(sorted((x, d) for x, d in env.items() if x in fvs))
        key = ("c", state, stack, items, id(f))
        got = self.index.get(key)
        if got is not None:
            return got
        idx = self.new_node(None, ("config", state, stack, dict(items), f), key)
        self.pending.append(idx)
        return idx

    def aux(self, kind, payload, key):
        got = self.index.get(key)
        if got is not None:
            return got
        idx = self.new_node(kind, payload, key)
        self.pending.append(idx)
        return idx

    @staticmethod
    def apply_denot(g, args):
        for a in args:
            g = g.table[index_of(a)]
        return g

    def build(self, start_state):
        start = self.config(start_state, (), {}, self.phi)
        while self.pending:
            idx = self.pending.pop()
            payload = self.payloads[idx]
            if payload[0] == "config":
                self.expand_config(idx, payload)
            elif payload[0] == "g":
                self.expand_guess(idx, payload)
            else:
                self.expand_challenge(idx, payload)
        return Game(self.kinds, self.payloads, self.edges, start, self.lts)

    def expand_config(self, idx, payload):
        _, state, stack, env, f = payload
        lts = self.lts
        if isinstance(f, Prop):
            self.kinds[idx] = WIN_E if lts.has_prop(state, f.name) else WIN_A
        elif isinstance(f, Var):
            val = self.apply_denot(env[f.name], stack)
            self.kinds[idx] = WIN_E if val.mask >> state & 1 else WIN_A
        elif isinstance(f, Or):
            self.kinds[idx] = EXISTS
            self.add_edge(idx, self.config(state, (), env, f.left))
            self.add_edge(idx, self.config(state, (), env, f.right))
        elif isinstance(f, Dia):
            succs = lts.successors(state, f.action)
            if not succs:
                self.kinds[idx] = WIN_A
            else:
                self.kinds[idx] = EXISTS
                for t in succs:
                    self.add_edge(idx, self.config(t, (), env, f.body))
        elif isinstance(f, Lam):
            self.kinds[idx] = EXISTS
            env2 = dict(env)
            env2[f.var] = stack[0]
            self.add_edge(idx, self.config(state, stack[1:], env2, f.body))
        elif isinstance(f, App):
            self.app_node(idx, state, stack, env, f, negated=False)
        elif isinstance(f, Neg):
            b = f.body
            if isinstance(b, Prop):
                self.kinds[idx] = (
                    WIN_E if not lts.has_prop(state, b.name) else WIN_A
                )
            elif isinstance(b, Var):
                val = self.apply_denot(env[b.name], stack)
                self.kinds[idx] = (
                    WIN_E if not (val.mask >> state & 1) else WIN_A
                )
            elif isinstance(b, Or):
                self.kinds[idx] = FORALL
                self.add_edge(
                    idx, self.config(state, (), env, self.neg_of(b.left))
                )
                self.add_edge(
                    idx, self.config(state, (), env, self.neg_of(b.right))
                )
            elif isinstance(b, Dia):
                succs = lts.successors(state, b.action)
                if not succs:
                    self.kinds[idx] = WIN_E
                else:
                    self.kinds[idx] = FORALL
                    for t in succs:
                        self.add_edge(
                            idx, self.config(t, (), env, self.neg_of(b.body))
                        )
            elif isinstance(b, Neg):
                self.kinds[idx] = EXISTS
                self.add_edge(idx, self.config(state, stack, env, b.body))
            elif isinstance(b, Lam):
                self.kinds[idx] = EXISTS
                env2 = dict(env)
                env2[b.var] = stack[0]
                self.add_edge(
                    idx,
                    self.config(state, stack[1:], env2, self.neg_of(b.body)),
                )
            elif isinstance(b, App):
                self.app_node(idx, state, stack, env, b, negated=True)
            else:
                raise InternalError(f"unhandled negated formula {b!r}")
        else:
            raise InternalError(f"unhandled formula {f!r}")

    def app_node(self, idx, state, stack, env, app, negated):
        self.kinds[idx] = EXISTS
        sigma = self.types[id(app.arg)]
        for gi, g in enumerate(self.domain(sigma)):
            aux = self.aux(
                FORALL,
                ("g", state, stack, env, app, g, negated, idx),
                ("g", idx, gi),
            )
            self.add_edge(idx, aux)

    def expand_guess(self, idx, payload):
        _, state, stack, env, app, g, negated, _parent = payload
        func = self.neg_of(app.func) if negated else app.func
        self.add_edge(idx, self.config(state, (g,) + stack, env, func))
        if self.monolithic:
            sigma_args = uncurry(self.types[id(app.arg)])
            domains = [self.domain(t) for t in sigma_args]
            for hs in itertools.product(*domains):
                self.add_challenge_outcomes(idx, env, app, g, tuple(hs))
        else:
            entry = self.aux(FORALL, ("h", env, app, g, (), idx), ("h", idx, ()))
            self.add_edge(idx, entry)

    def expand_challenge(self, idx, payload):
        _, env, app, g, hs, guess_idx = payload
        sigma_args = uncurry(self.types[id(app.arg)])
        picked = len(hs)
        if picked < len(sigma_args):
            for hi, h in enumerate(self.domain(sigma_args[picked])):
                hs2 = hs + (h,)
                succ = self.aux(
                    FORALL,
                    ("h", env, app, g, hs2, guess_idx),
                    ("h", guess_idx, tuple(index_of(x) for x in hs2)),
                )
                self.add_edge(idx, succ)
            return
        self.add_challenge_outcomes(idx, env, app, g, hs)

    def add_challenge_outcomes(self, idx, env, app, g, hs):
        value = self.apply_denot(g, hs)
        for t in range(self.lts.n):
            if value.mask >> t & 1:
                self.add_edge(idx, self.config(t, hs, env, app.arg))
            else:
                self.add_edge(idx, self.config(t, hs, env, self.neg_of(app.arg)))


def build_game(lts: Lts, start_state: int, phi: Formula,
               limit: int = DEFAULT_GAME_LIMIT,
               enum_limit: int = denote.DEFAULT_ENUM_LIMIT,
               monolithic: bool = False) -> Game:
    """The model-checking game for a closed, fixpoint-free ground formula.

    Configurations are hash-consed so shared subformulas share subgames.
    Construction counts nodes plus edges as it goes and stops with the
    closed-form estimate attached once the count passes `limit`.  With
    `monolithic` the opponent's challenge is a single tuple choice; the
    default chains it through one pick per node.
    """
    if not 0 <= start_state < lts.n:
        raise ValueError(f"state {start_state} out of range")
    return _Builder(lts, phi, limit, enum_limit, monolithic).build(start_state)


def solve(game: Game) -> Solution:
    """Backward induction over the DAG; linear in the edge count."""
    n = game.node_count
    for u, k in enumerate(game.kinds):
        if k in (WIN_E, WIN_A):
            if game.edges[u]:
                raise InternalError("terminal node with outgoing edges")
        elif not game.edges[u]:
            raise InternalError("non-terminal node without moves")

    order = topological_order(game)
    winners = [None] * n
    strategy_e: dict = {}
    strategy_a: dict = {}
    for u in reversed(order):
        k = game.kinds[u]
        if k == WIN_E:
            winners[u] = EXISTS
        elif k == WIN_A:
            winners[u] = FORALL
        elif k == EXISTS:
            winners[u] = FORALL
            for v in game.edges[u]:
                if winners[v] == EXISTS:
                    winners[u] = EXISTS
                    strategy_e[u] = v
                    break
        else:
            winners[u] = EXISTS
            for v in game.edges[u]:
                if winners[v] == FORALL:
                    winners[u] = FORALL
                    strategy_a[u] = v
                    break
    winner = winners[game.start]
    strategy = dict(strategy_e if winner == EXISTS else strategy_a)
    own_kind = EXISTS if winner == EXISTS else FORALL
    for u, k in enumerate(game.kinds):
        if k == own_kind and u not in strategy:
            strategy[u] = game.edges[u][0]
    return Solution(winner, winners, strategy)


def topological_order(game: Game):
    indeg = [0] * game.node_count
    for succs in game.edges:
        for v in succs:
            indeg[v] += 1
    stack = [u for u in range(game.node_count) if indeg[u] == 0]
    order = []
    while stack:
        u = stack.pop()
        order.append(u)
        for v in game.edges[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    if len(order) != game.node_count:
        raise InternalError("game graph has a cycle; plays must be finite")
    return order


def check_via_games(lts: Lts, state: int, phi: Formula,
                    game_limit: int = DEFAULT_GAME_LIMIT,
                    enum_limit: int = denote.DEFAULT_ENUM_LIMIT,
                    unfold_budget: int = 4096,
                    size_budget: int = 10**6) -> bool:
    """Eliminate fixpoints, build the game, solve; true iff state satisfies."""
    phi = syntax.desugar_vec(phi)
    infer(EMPTY_CONTEXT, phi)
    fp_free = eliminate_fixpoints(phi, lts, unfold_budget, size_budget)
    game = build_game(lts, state, fp_free, game_limit, enum_limit)
    return solve(game).winner == EXISTS


# ---------------------------------------------------------------------------
# Export


def _node_label(game: Game, u: int) -> str:
    payload = game.payloads[u]
    if payload[0] == "config":
        _, state, stack, _env, f = payload
        text = surface.print_formula(f)
        if len(text) > 40:
            text = text[:37] + "..."
        if stack:
            return f"{state} ({len(stack)} args) |- {text}"
        return f"{state} |- {text}"
    if payload[0] == "g":
        return "guess"
    return f"pick {len(payload[4])}"


def export_game(game: Game, fmt: str, solution: Solution | None = None) -> str:
    if fmt == "dot":
        return _export_dot(game, solution)
    if fmt == "json":
        return _export_json(game, solution)
    raise ValueError(f"unknown export format {fmt!r}")


def _export_dot(game: Game, solution) -> str:
    shapes = {EXISTS: "diamond", FORALL: "box", WIN_E: "doublecircle",
              WIN_A: "doubleoctagon"}
    lines = ["digraph game {"]
    for u in range(game.node_count):
        label = _node_label(game, u).replace('"', "'")
        attrs = [f"shape={shapes[game.kinds[u]]}", f'label="{label}"']
        if solution is not None:
            color = "green" if solution.winners[u] == EXISTS else "red"
            attrs.append(f"color={color}")
        if u == game.start:
            attrs.append("penwidth=3")
        lines.append(f'  n{u} [{", ".join(attrs)}];')
    for u, succs in enumerate(game.edges):
        for v in succs:
            lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _export_json(game: Game, solution) -> str:
    nodes = []
    for u in range(game.node_count):
        entry = {"id": u, "kind": game.kinds[u], "label": _node_label(game, u)}
        if solution is not None:
            entry["winner"] = solution.winners[u]
        nodes.append(entry)
    doc = {
        "schema": "hflcheck-game-v1",
        "start": game.start,
        "nodes": nodes,
        "edges": [[u, v] for u in range(game.node_count)
                  for v in game.edges[u]],
    }
    if solution is not None:
        doc["winner"] = solution.winner
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"

"""Seeded random generators for models and well-typed formulas.

The formula generator is type-directed and tracks variances exactly the
way the checker composes them: a variable is usable relative to the
parity of negations crossed since its own binder, and subterms that must
check under both a context and its complement (arguments at variance 0)
only see variance-0 variables from outside.  Everything emitted
typechecks by construction; tests assert it anyway.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from hflcheck.lts import Lts, make_lts
from hflcheck.syntax import App, Dia, Lam, Mu, Neg, Or, Prop, Var, ff, tt
from hflcheck.types import PR, Arrow, Variance

PROPS = ("p", "q")
ACTIONS = ("a", "b")


def random_lts(rng: random.Random, max_states: int,
               actions=ACTIONS, props=PROPS) -> Lts:
    n = rng.randint(1, max_states)
    trans = []
    for a in actions:
        for s in range(n):
            for t in range(n):
                if rng.random() < 0.35:
                    trans.append((s, a, t))
    labels = [(s, p) for s in range(n) for p in props if rng.random() < 0.4]
    return make_lts(n, trans, labels)


def random_mu_formula(rng: random.Random, depth: int,
                      props=PROPS, actions=ACTIONS):
    """Closed random formula of the ground fragment (no lambdas)."""
    counter = [0]

    def go(depth, scope, parity):
        # scope entries: (name, bind_parity); usable at matching parity
        usable = [x for x, bp in scope if bp == parity]
        choices = ["prop"]
        if depth > 0:
            choices += ["neg", "or", "or", "dia", "dia", "mu"]
        if usable:
            choices += ["var", "var"]
        pick = rng.choice(choices)
        if pick == "var":
            return Var(rng.choice(usable))
        if pick == "prop" or depth == 0:
            return Prop(rng.choice(props))
        if pick == "neg":
            return Neg(go(depth - 1, scope, 1 - parity))
        if pick == "or":
            return Or(go(depth - 1, scope, parity),
                      go(depth - 1, scope, parity))
        if pick == "dia":
            return Dia(rng.choice(actions), go(depth - 1, scope, parity))
        counter[0] += 1
        name = f"V{counter[0]}"
        body = go(depth - 1, [(name, parity)] + scope, parity)
        return Mu(name, PR, body)

    return go(depth, [], 0)


@dataclass(frozen=True)
class _Entry:
    variance: Variance
    ty: object
    bind_parity: int
    bind_epoch: int
    is_mu: bool


@dataclass
class HoGenConfig:
    """Knobs for the higher-order generator."""

    max_depth: int = 4
    allow_fun_args: bool = True  # applications with Pr->Pr arguments
    mu_arrow: bool = True  # fixpoints at type Pr^0 -> Pr
    tabulate_safe: bool = False  # keep whole-table iteration convergent


_FUN = Arrow(PR, Variance.ZERO, PR)


def random_hfl_formula(rng: random.Random, cfg: HoGenConfig):
    counter = [0]

    def fresh():
        counter[0] += 1
        return f"V{counter[0]}"

    def usable(scope, parity, epoch, mu_depth, ty):
        out = []
        for name, e in scope.items():
            if e.ty != ty:
                continue
            if cfg.tabulate_safe and mu_depth > 0 and isinstance(e.ty, Arrow):
                continue
            if e.bind_epoch != epoch:
                ok = e.variance is Variance.ZERO
            else:
                rel = parity ^ e.bind_parity
                ok = (
                    e.variance is Variance.ZERO
                    or (e.variance is Variance.PLUS and rel == 0)
                    or (e.variance is Variance.MINUS and rel == 1)
                )
            if ok:
                out.append(name)
        return out

    def go(ty, depth, scope, parity, epoch, mu_depth, in_arg):
        if isinstance(ty, Arrow):
            vars_here = usable(scope, parity, epoch, mu_depth, ty)
            if vars_here and rng.random() < 0.3:
                return Var(rng.choice(vars_here))
            if (depth > 0 and cfg.mu_arrow and ty == _FUN
                    and not (cfg.tabulate_safe and mu_depth > 0)
                    and rng.random() < 0.2):
                return gen_mu(ty, depth, scope, parity, epoch, mu_depth, in_arg)
            name = fresh()
            entry = _Entry(ty.variance, ty.arg, parity, epoch, False)
            body = go(ty.result, depth - 1, {**scope, name: entry},
                      parity, epoch, mu_depth, in_arg)
            return Lam(name, ty.variance, ty.arg, body)
        vars_here = usable(scope, parity, epoch, mu_depth, PR)
        if cfg.tabulate_safe and in_arg and mu_depth > 0:
            vars_here = [x for x in vars_here if not scope[x].is_mu]
        choices = ["prop", "prop", "tt"]
        if depth > 0:
            choices += ["neg", "or", "or", "dia", "dia", "app", "app"]
            if not (cfg.tabulate_safe and mu_depth > 0):
                choices += ["mu"]
                if cfg.mu_arrow:
                    choices += ["mu_fun"]
        if vars_here:
            choices += ["var", "var", "var"]
        pick = rng.choice(choices)
        if pick == "var":
            return Var(rng.choice(vars_here))
        if pick == "prop":
            return Prop(rng.choice(PROPS))
        if pick == "tt":
            return tt() if rng.random() < 0.5 else ff()
        if pick == "neg":
            return Neg(go(ty, depth - 1, scope, 1 - parity, epoch,
                          mu_depth, in_arg))
        if pick == "or":
            return Or(
                go(ty, depth - 1, scope, parity, epoch, mu_depth, in_arg),
                go(ty, depth - 1, scope, parity, epoch, mu_depth, in_arg),
            )
        if pick == "dia":
            return Dia(rng.choice(ACTIONS),
                       go(ty, depth - 1, scope, parity, epoch, mu_depth, in_arg))
        if pick == "mu":
            return gen_mu(PR, depth, scope, parity, epoch, mu_depth, in_arg)
        if pick == "mu_fun":
            mu = gen_mu(_FUN, depth, scope, parity, epoch, mu_depth, in_arg)
            arg = gen_arg(PR, Variance.ZERO, depth - 1, scope, parity,
                          epoch, mu_depth)
            return App(mu, arg)
        sigma = PR
        if cfg.allow_fun_args and rng.random() < 0.25:
            sigma = _FUN
        variance = rng.choice(
            (Variance.ZERO, Variance.PLUS, Variance.PLUS, Variance.MINUS)
        )
        fun = go(Arrow(sigma, variance, ty), depth - 1, scope, parity,
                 epoch, mu_depth, in_arg)
        arg = gen_arg(sigma, variance, depth - 1, scope, parity, epoch,
                      mu_depth)
        return App(fun, arg)

    def gen_arg(sigma, variance, depth, scope, parity, epoch, mu_depth):
        if variance is Variance.PLUS:
            return go(sigma, depth, scope, parity, epoch, mu_depth, True)
        if variance is Variance.MINUS:
            return go(sigma, depth, scope, 1 - parity, epoch, mu_depth, True)
        return go(sigma, depth, scope, parity, epoch + 1, mu_depth, True)

    def gen_mu(ty, depth, scope, parity, epoch, mu_depth, in_arg):
        name = fresh()
        entry = _Entry(Variance.PLUS, ty, parity, epoch, True)
        body = go(ty, depth - 1, {**scope, name: entry}, parity, epoch,
                  mu_depth + 1, in_arg)
        return Mu(name, ty, body)

    return go(PR, cfg.max_depth, {}, 0, 0, 0, False)

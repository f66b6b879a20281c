"""Shared helpers: ad-hoc scene construction and bounded random smooth
expressions for oracle-style tests."""

from __future__ import annotations

import numpy as np

from obstruct import exprlang
from obstruct.geometry import Scene
from obstruct.poisson import OneFormField


def maxabs(x) -> float:
    return float(np.max(np.abs(np.asarray(x))))


def make_scene(coords, metric_rows, poisson_rows, box, params=None,
               exclude=None, name="test") -> Scene:
    params = params or {}
    names = list(params)
    parse = lambda s: exprlang.parse(s, coords, names)
    return Scene(
        coords=tuple(coords),
        params=params,
        metric=tuple(tuple(parse(e) for e in row) for row in metric_rows),
        poisson=tuple(tuple(parse(e) for e in row) for row in poisson_rows),
        box=tuple(box),
        exclude=None if exclude is None else parse(exclude),
        name=name,
    )


def flat_scene(n: int, theta: float = 1.0) -> Scene:
    coords = [f"x{i+1}" for i in range(n)]
    metric = [["1" if i == j else "0" for j in range(n)] for i in range(n)]
    poisson = [["0"] * n for _ in range(n)]
    if n >= 2:
        poisson[0][1] = repr(theta)
        poisson[1][0] = repr(-theta)
    return make_scene(coords, metric, poisson, [(-1.0, 1.0)] * n)


# -- random smooth expressions -------------------------------------------------
#
# Trees are built so that on points with |x_i| <= bound every subexpression
# stays in a known range: log and sqrt only see 1 + t^2, exp only sees
# arguments bounded by ~1.  This keeps finite differences well conditioned.


def random_smooth_expr(rng: np.random.Generator, coords, depth: int = 3,
                       params=()) -> exprlang.Expr:
    names = list(params)

    def atom() -> str:
        kind = rng.integers(0, 3)
        if kind == 0:
            return repr(float(rng.uniform(-1, 1)))
        name = coords[rng.integers(0, len(coords))]
        if kind == 1:
            return name
        other = coords[rng.integers(0, len(coords))]
        return f"({name} * {other})"

    def build(d: int) -> str:
        if d <= 0:
            return atom()
        kind = rng.integers(0, 10)
        a, b = build(d - 1), build(d - 1)
        if kind == 0:
            return f"({a} + {b})"
        if kind == 1:
            return f"({a} - {b})"
        if kind == 2:
            return f"({a} * {b})"
        if kind == 3:
            return f"({a} / (2 + {b}^2))"
        if kind == 4:
            return f"sin({a})"
        if kind == 5:
            return f"cos({a})"
        if kind == 6:
            return f"exp(sin({a}))"
        if kind == 7:
            return f"log(2 + {a}^2)"
        if kind == 8:
            return f"(1 + {a}^2)^1.5"
        return f"sqrt(1 + {a}^2)"

    return exprlang.parse(build(depth), list(coords), names)


def random_form(rng: np.random.Generator, scene: Scene, depth: int = 2) -> OneFormField:
    return OneFormField.from_components(
        [random_smooth_expr(rng, scene.coords, depth, params=list(scene.params))
         for _ in scene.coords])


# -- independent oracles for the Koszul-bracket identities ----------------------


def poisson_bracket_differential(scene, f, g, point):
    """d{f,g}_k = d_k(pi^{ab} f_a g_b), assembled from jet data only."""
    from obstruct import geometry

    pi = geometry.eval_field(scene, "poisson", point)
    fe = geometry.eval_field(scene, [f], point)
    ge = geometry.eval_field(scene, [g], point)
    fa, fak = fe.d1[0], fe.d2[0]
    ga, gak = ge.d1[0], ge.d2[0]
    return (np.einsum("abk,a,b->k", pi.d1, fa, ga)
            + np.einsum("ab,ak,b->k", pi.components, fak, ga)
            + np.einsum("ab,a,bk->k", pi.components, fa, gak))


def koszul_bracket_exprs(scene, sigma, rho):
    """The Koszul bracket as a component field, built by symbolic
    differentiation of the Cartan-type formula (independent of the
    numeric bracket kernel)."""
    n = scene.dimension
    d = exprlang.differentiate
    mul = lambda a, b: exprlang.BinOp("*", a, b)
    add = lambda a, b: exprlang.BinOp("+", a, b)
    neg = exprlang.Neg
    pi = [[scene.poisson[i][j] for j in range(n)] for i in range(n)]
    out = []
    for k in range(n):
        term = exprlang.Num(0.0)
        for a in range(n):
            xs_a = exprlang.Num(0.0)
            xr_a = exprlang.Num(0.0)
            for i in range(n):
                xs_a = add(xs_a, mul(pi[i][a], sigma.components[i]))
                xr_a = add(xr_a, mul(pi[i][a], rho.components[i]))
            term = add(term, mul(xs_a, d(rho.components[k], a)))
            term = add(term, mul(rho.components[a], d(xs_a, k)))
            term = add(term, neg(mul(xr_a, d(sigma.components[k], a))))
            term = add(term, neg(mul(sigma.components[a], d(xr_a, k))))
            for b in range(n):
                term = add(term, neg(d(mul(mul(pi[a][b], sigma.components[a]),
                                           rho.components[b]), k)))
        out.append(term)
    return out


def lie_bracket_of_sharps(scene, sigma, rho, point):
    """[#sigma, #rho] from jet data of the pushed vector fields."""
    from obstruct import geometry

    pi = geometry.eval_field(scene, "poisson", point)
    sv = sigma.evaluate(scene, point)
    rv = rho.evaluate(scene, point)
    xs = np.einsum("ij,i->j", pi.components, sv.components)
    xr = np.einsum("ij,i->j", pi.components, rv.components)
    dxs = (np.einsum("ijm,i->jm", pi.d1, sv.components)
           + np.einsum("ij,im->jm", pi.components, sv.d1))
    dxr = (np.einsum("ijm,i->jm", pi.d1, rv.components)
           + np.einsum("ij,im->jm", pi.components, rv.d1))
    return np.einsum("a,ja->j", xs, dxr) - np.einsum("a,ja->j", xr, dxs)

"""Loops on R^3: the four section families over the 4-dim group, section loops,
divisions, axiom checks, associators and centrality diagnostics.

Points are arrays of shape (3,) or (3, N).  Divisions follow the usual
convention: ``ldiv(a, b)`` solves a*x = b and ``rdiv(b, a)`` solves x*a = b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import exprdsl
from .groupcat import GroupLaw, SubgroupSpec, get_law
from .numerics import (DEFAULT_SEED, TAU_LOOP, MultipleSolutions, NoSolution, newton_batch, rng,
                       scan_roots)
from .report import Report

Array = np.ndarray
Func = Union[str, exprdsl.Expr, Callable]
_e = np.exp


class FNotNormalized(ValueError):
    pass


class HNotNormalized(ValueError):
    pass


def _stack(*cols) -> Array:
    return np.stack(np.broadcast_arrays(*cols))


def _as2d(p) -> tuple[Array, bool]:
    p = np.asarray(p, dtype=float)
    return (p[:, None], True) if p.ndim == 1 else (p, False)


def _vectorized(fn):
    """Lift a (3, N) -> (3, N) map so it also takes single points."""

    def wrapped(*args):
        arrs = [_as2d(a) for a in args]
        out = fn(*(a for a, _ in arrs))
        return out[:, 0] if all(single for _, single in arrs) else out

    wrapped.__wrapped__ = fn
    return wrapped


def _compile(f: Func, args: str, what: str) -> Callable:
    if callable(f):
        return f
    tree = exprdsl.as_expr(f)
    extra = exprdsl.free_vars(tree) - set(args)
    if extra:
        raise ValueError(f"{what} may only use {', '.join(args)}; got {', '.join(sorted(extra))}")
    fn = exprdsl.compile_expr(tree, args)

    def call(*vals):
        # constants must still broadcast to the argument shape
        return np.asarray(fn(*vals), dtype=float) + 0.0 * vals[0]

    call.expr = tree
    return call


def _label(f: Func) -> str:
    if isinstance(f, str):
        return f
    if hasattr(f, "expr"):
        return exprdsl.to_str(f.expr)
    if callable(f):
        return getattr(f, "__name__", "callable")
    return exprdsl.to_str(f)


@dataclass(frozen=True)
class LoopLaw:
    name: str
    mul: Callable[[Array, Array], Array]
    ldiv: Callable[[Array, Array], Array]
    rdiv: Callable[[Array, Array], Array]
    params: dict = field(default_factory=dict)
    # catalog data: directions whose multiples are expected to be central
    central_dirs: tuple[tuple[float, ...], ...] = ()
    solver_backed: bool = False

    @property
    def identity(self) -> Array:
        return np.zeros(3)


# --- the four families -------------------------------------------------------------


def family_a(f: Func) -> LoopLaw:
    """(x1 + x2 e^{f(z1)}, y1 + y2 + z2 f(z1), z1 + z2) with f(0) = 0."""
    F = _compile(f, "z", "f")
    if abs(float(F(np.zeros(1))[0])) > 1e-12:
        raise FNotNormalized(f"f(0) = {float(F(np.zeros(1))[0])!r}, must be 0")

    @_vectorized
    def mul(p, q):
        fz = F(p[2])
        return _stack(p[0] + q[0] * _e(fz), p[1] + q[1] + q[2] * fz, p[2] + q[2])

    @_vectorized
    def ldiv(a, b):
        fz = F(a[2])
        return _stack((b[0] - a[0]) * _e(-fz), b[1] - a[1] - (b[2] - a[2]) * fz, b[2] - a[2])

    @_vectorized
    def rdiv(b, a):
        z = b[2] - a[2]
        fz = F(z)
        return _stack(b[0] - a[0] * _e(fz), b[1] - a[1] - a[2] * fz, z)

    return LoopLaw("family_a", mul, ldiv, rdiv, {"f": _label(f)}, ((0.0, 1.0, 0.0),))


def family_b(h: Func) -> LoopLaw:
    """(x1 + x2 e^{z1}, y1 + y2 - z2 h(x1, z1), z1 + z2) with h(0, 0) = 0."""
    H = _compile(h, "xz", "h")
    if abs(float(H(np.zeros(1), np.zeros(1))[0])) > 1e-12:
        raise HNotNormalized("h(0, 0) must be 0")

    @_vectorized
    def mul(p, q):
        return _stack(p[0] + q[0] * _e(p[2]), p[1] + q[1] - q[2] * H(p[0], p[2]), p[2] + q[2])

    @_vectorized
    def ldiv(a, b):
        z = b[2] - a[2]
        return _stack((b[0] - a[0]) * _e(-a[2]), b[1] - a[1] + z * H(a[0], a[2]), z)

    @_vectorized
    def rdiv(b, a):
        z = b[2] - a[2]
        x = b[0] - a[0] * _e(z)
        return _stack(x, b[1] - a[1] + a[2] * H(x, z), z)

    return LoopLaw("family_b", mul, ldiv, rdiv, {"h": _label(h)}, ((0.0, 1.0, 0.0),))


def _scalar_solve(g: Callable[[Array, Array], Array], n: int, what: str, points: Array) -> Array:
    """The unique root in [-10, 10] of each scalar problem, or raise."""
    res = scan_roots(g, n)
    if np.any(res.count == 0):
        i = int(np.argmin(res.count))
        raise NoSolution(f"{what}: no solution in [-10, 10]", witness=points[:, i])
    if np.any(res.count > 1):
        i = int(np.argmax(res.count))
        raise MultipleSolutions(f"{what}: {int(res.count[i])} solutions", witness=points[:, i],
                                roots=res.roots[i][np.isfinite(res.roots[i])])
    return res.roots[:, 0]


def family_c(f: Func) -> LoopLaw:
    """(x1 + e^{z1}(x2 + F(1 - e^{z2})), y1 + y2 - z2 F, z1 + z2), F = f(x1, y1, z1).

    Right division reduces to the scalar equation t = f(x(t), y(t), z) in the
    value t of f at the unknown; its roots are located by a bracketing scan.
    """
    F = _compile(f, "xyz", "f")
    zero = np.zeros(1)
    if abs(float(F(zero, zero, zero)[0])) > 1e-12:
        raise FNotNormalized("f(0, 0, 0) must be 0")

    @_vectorized
    def mul(p, q):
        v = F(p[0], p[1], p[2])
        return _stack(p[0] + _e(p[2]) * (q[0] + v * (1 - _e(q[2]))), p[1] + q[1] - q[2] * v, p[2] + q[2])

    @_vectorized
    def ldiv(a, b):
        z = b[2] - a[2]
        v = F(a[0], a[1], a[2])
        return _stack((b[0] - a[0]) * _e(-a[2]) - v * (1 - _e(z)), b[1] - a[1] + z * v, z)

    def _parts(b, a, t):
        z = b[2] - a[2]
        y = b[1] - a[1] + a[2] * t
        x = b[0] - _e(z) * a[0] + _e(b[2]) * (1 - _e(-a[2])) * t
        return x, y, z

    @_vectorized
    def rdiv(b, a):
        n = b.shape[1]

        def g(idx, t):
            bb, aa = b[:, idx, None], a[:, idx, None]
            x, y, z = _parts(bb, aa, t)
            return t - F(x, y, np.broadcast_to(z, t.shape))

        t = _scalar_solve(g, n, "family_c right division", np.concatenate([b, a]))
        x, y, z = _parts(b, a, t)
        return _stack(x, y, z)

    return LoopLaw("family_c", mul, ldiv, rdiv, {"f": _label(f)}, solver_backed=True)


def family_d(k: Func) -> LoopLaw:
    """(x1 + e^{z1}[x2 + K - e^{z2}(z1 y2 + K)], y1 + y2, z1 + z2), K = k(x1, y1, z1)."""
    K = _compile(k, "xyz", "k")
    zero = np.zeros(1)
    if abs(float(K(zero, zero, zero)[0])) > 1e-12:
        raise FNotNormalized("k(0, 0, 0) must be 0")

    @_vectorized
    def mul(p, q):
        v = K(p[0], p[1], p[2])
        return _stack(p[0] + _e(p[2]) * (q[0] + v - _e(q[2]) * (p[2] * q[1] + v)), p[1] + q[1], p[2] + q[2])

    @_vectorized
    def ldiv(a, b):
        z = b[2] - a[2]
        y = b[1] - a[1]
        v = K(a[0], a[1], a[2])
        return _stack((b[0] - a[0]) * _e(-a[2]) - v + _e(z) * (a[2] * y + v), y, z)

    def _x(b, a, t):
        z = b[2] - a[2]
        rhs = b[0] - a[0] * _e(z) + _e(b[2]) * z * a[1]
        return rhs - _e(b[2]) * (_e(-a[2]) - 1) * t

    @_vectorized
    def rdiv(b, a):
        n = b.shape[1]
        y = b[1] - a[1]
        z = b[2] - a[2]

        def g(idx, t):
            bb, aa = b[:, idx, None], a[:, idx, None]
            return t - K(_x(bb, aa, t), np.broadcast_to(y[idx, None], t.shape),
                         np.broadcast_to(z[idx, None], t.shape))

        t = _scalar_solve(g, n, "family_d right division", np.concatenate([b, a]))
        return _stack(_x(b, a, t), y, z)

    return LoopLaw("family_d", mul, ldiv, rdiv, {"k": _label(k)}, solver_backed=True)


FAMILIES = {"family_a": (family_a, "f", "z"), "family_b": (family_b, "h", "xz"),
            "family_c": (family_c, "f", "xyz"), "family_d": (family_d, "k", "xyz")}


def get_family(name: str, expr: Func) -> LoopLaw:
    try:
        ctor = FAMILIES[name][0]
    except KeyError:
        raise KeyError(f"unknown loop family {name!r}") from None
    return ctor(expr)


# --- section loops -----------------------------------------------------------------


@dataclass(frozen=True)
class SectionLoop:
    law: GroupLaw
    subgroup: SubgroupSpec
    section: Callable[[Array], Array]  # (3, N) -> (n, N), section(0) = identity
    name: str = ""
    central_dirs: tuple[tuple[float, ...], ...] = ()

    def coset_coords(self, g: Array) -> Array:
        return self.subgroup.coset_coords(g)

    def lift(self, c: Array) -> Array:
        return self.subgroup.lift(c)


def section_invariants(s: SectionLoop, n: int = 200, seed: int = DEFAULT_SEED, box: float = 2.0) -> float:
    """Max violation of cc(lift(p)) = p, coset constancy and section(0) = 1."""
    r = rng(seed)
    p = r.uniform(-box, box, (3, n))
    errs = [np.max(np.abs(s.coset_coords(s.lift(p)) - p))]
    t = r.uniform(-1, 1, (s.subgroup.k, n))
    g = s.law.mul(s.lift(p), s.subgroup.parametrization(t))
    errs.append(np.max(np.abs(s.coset_coords(g) - p)))
    errs.append(np.max(np.abs(s.coset_coords(s.section(p)) - p)))
    errs.append(np.max(np.abs(s.section(np.zeros((3, 1))))))
    return float(max(errs))


def loop_from_section(s: SectionLoop, max_iter: int = 60) -> LoopLaw:
    """x*y = cc(section(x) lift(y)); left division is exact, right division by Newton."""
    law = s.law

    @_vectorized
    def mul(p, q):
        return s.coset_coords(law.mul(s.section(p), s.lift(q)))

    @_vectorized
    def ldiv(a, b):
        return s.coset_coords(law.mul(law.inv(s.section(a)), s.lift(b)))

    @_vectorized
    def rdiv(b, a):
        la = s.lift(a)
        F = lambda p: s.coset_coords(law.mul(s.section(p), la))  # noqa: E731
        x, res = newton_batch(F, b, b.copy(), tol=1e-13, max_iter=max_iter)
        bad = res > 1e-10
        if np.any(bad):
            # restart the stragglers from the left quotient, a cheap second guess
            guess = ldiv.__wrapped__(a, b)
            x2, res2 = newton_batch(F, b, guess, tol=1e-13, max_iter=max_iter)
            better = res2 < res
            x = np.where(better, x2, x)
            res = np.where(better, res2, res)
            if np.any(res > 1e-10):
                i = int(np.argmax(res))
                raise NoSolution(f"{s.name}: right division did not converge", witness=np.concatenate([b[:, i], a[:, i]]))
        return x

    return LoopLaw(s.name or f"section:{law.name}", mul, ldiv, rdiv, {"law": law.name, "subgroup": s.subgroup.name},
                   s.central_dirs, solver_backed=True)


def _h_subgroup(name, law, param, eqs, cc, lift, tangent, rel):
    return SubgroupSpec(name, law, 1, param, eqs, cc, lift, (tuple(tangent),), rel)


def h_subgroup(i: int, law: GroupLaw | None = None) -> SubgroupSpec:
    """The four non-normal 1-dim subgroups H_1..H_4 of the 4-dim group."""
    law = law or get_law("g43")
    zero = 0.0
    if i == 1:
        return _h_subgroup("H1", law, lambda t: _stack(zero, zero, zero, t[0]),
                           lambda g: _stack(g[0], g[1], g[2]),
                           lambda g: _stack(g[0], g[1], g[2]),
                           lambda c: _stack(c[0], c[1], c[2], zero), (0, 0, 0, 1), "g(0, 0, 0, t)")
    if i == 2:
        return _h_subgroup("H2", law, lambda t: _stack(zero, zero, t[0], zero),
                           lambda g: _stack(g[0], g[1], g[3]),
                           lambda g: _stack(g[0], g[1] - g[3] * g[2], g[3]),
                           lambda c: _stack(c[0], c[1], zero, c[2]), (0, 0, 1, 0), "g(0, 0, t, 0)")
    if i == 3:
        return _h_subgroup("H3", law, lambda t: _stack(t[0], zero, t[0], zero),
                           lambda g: _stack(g[1], g[3], g[0] - g[2]),
                           lambda g: _stack(g[0] - _e(g[3]) * g[2], g[1] - g[3] * g[2], g[3]),
                           lambda c: _stack(c[0], c[1], zero, c[2]), (1, 0, 1, 0), "g(t, 0, t, 0)")
    if i == 4:
        return _h_subgroup("H4", law, lambda t: _stack(t[0], t[0], zero, zero),
                           lambda g: _stack(g[2], g[3], g[0] - g[1]),
                           lambda g: _stack(g[0] - _e(g[3]) * g[1], g[2], g[3]),
                           lambda c: _stack(c[0], zero, c[1], c[2]), (1, 1, 0, 0), "g(t, t, 0, 0)")
    raise ValueError("i must be 1, 2, 3 or 4")


def family_section(name: str, expr: Func) -> SectionLoop:
    """The section over g43 / H_i whose loop is the named family."""
    law = get_law("g43")
    if name == "family_a":
        F = _compile(expr, "z", "f")
        sec = lambda c: _stack(c[0], c[1], c[2], F(c[2]))  # noqa: E731
        sg = h_subgroup(1, law)
    elif name == "family_b":
        H = _compile(expr, "xz", "h")
        sec = lambda c: _stack(c[0], c[1] + c[2] * H(c[0], c[2]), H(c[0], c[2]), c[2])  # noqa: E731
        sg = h_subgroup(2, law)
    elif name == "family_c":
        F = _compile(expr, "xyz", "f")

        def sec(c):
            v = F(c[0], c[1], c[2])
            return _stack(c[0] + _e(c[2]) * v, c[1] + c[2] * v, v, c[2])

        sg = h_subgroup(3, law)
    elif name == "family_d":
        K = _compile(expr, "xyz", "k")

        def sec(c):
            v = K(c[0], c[1], c[2])
            return _stack(c[0] + _e(c[2]) * v, v, c[1], c[2])

        sg = h_subgroup(4, law)
    else:
        raise KeyError(f"unknown loop family {name!r}")
    return SectionLoop(law, sg, sec, f"section:{name}")


def case_section(i: int) -> SectionLoop:
    """Section loops of the 5-dim cases 1 and 2, sections taken inside A_1, A_2."""
    from . import kepka

    if i == 1:
        law = get_law("mult1")

        def sec(c):
            u = _e(c[1]) - 1
            return _stack(c[0], u, c[2] - c[0] * u, 0.0 * c[0], c[1])

        return SectionLoop(law, kepka.inn1(law), sec, "case1", ((0.0, 0.0, 1.0),))
    if i == 2:
        law = get_law("mult2")
        return SectionLoop(law, kepka.inn2(law), kepka.A2(law).family, "case2", ((0.0, 0.0, 1.0),))
    raise ValueError("section loops are provided for cases 1 and 2")


# --- sampling --------------------------------------------------------------------------


def default_points(n_grid: int = 7, box: float = 2.0, n_random: int = 500, seed: int = DEFAULT_SEED) -> Array:
    """7^3 grid points of [-box, box]^3 plus seeded uniform points, shape (3, N)."""
    axis = np.linspace(-box, box, n_grid)
    mesh = np.meshgrid(axis, axis, axis, indexing="ij")
    grid = np.stack([m.ravel() for m in mesh])
    extra = rng(seed).uniform(-box, box, (3, n_random))
    return np.concatenate([grid, extra], axis=1)


def _partners(points: Array, count: int, seed: int) -> list[Array]:
    r = rng(seed + 1)
    return [points[:, r.permutation(points.shape[1])] for _ in range(count)]


# --- checks ------------------------------------------------------------------------------


def axioms_check(loop: LoopLaw, points: Array | None = None, *, seed: int = DEFAULT_SEED,
                 tol: float = TAU_LOOP, permutations: int = 4) -> Report:
    """Identity, a*(a\\b) = b, (b/a)*a = b and a\\(a*b) = b over sampled pairs."""
    P = default_points(seed=seed) if points is None else np.asarray(points, float)
    rep = Report("axioms", loop.name, False, 0.0, tol, params={**loop.params, "points": int(P.shape[1])})
    zero = np.zeros_like(P)
    parts = {"left identity": np.abs(loop.mul(zero, P) - P), "right identity": np.abs(loop.mul(P, zero) - P)}
    try:
        for k, Q in enumerate(_partners(P, permutations, seed)):
            parts[f"a*(a\\b) [{k}]"] = np.abs(loop.mul(P, loop.ldiv(P, Q)) - Q)
            parts[f"(b/a)*a [{k}]"] = np.abs(loop.mul(loop.rdiv(Q, P), P) - Q)
            parts[f"a\\(a*b) [{k}]"] = np.abs(loop.ldiv(P, loop.mul(P, Q)) - Q)
    except (NoSolution, MultipleSolutions) as exc:
        rep.max_residual = float("inf")
        rep.params["error"] = type(exc).__name__
        rep.params["message"] = str(exc)
        if exc.witness is not None:
            rep.witness("b, a", exc.witness)
        if getattr(exc, "roots", None) is not None:
            rep.witness("roots", exc.roots)
        return rep
    worst_name, worst = "", -1.0
    for name, d in parts.items():
        m = float(np.max(d))
        if not np.isfinite(m):
            m = float("inf")
        if m > worst:
            worst_name, worst = name, m
    d = parts[worst_name]
    i = int(np.argmax(np.max(d, axis=0)))
    rep.max_residual = worst
    rep.passed = worst < tol
    rep.witness(f"worst point ({worst_name})", P[:, i])
    return rep


def associator(loop: LoopLaw, a, b, c) -> Array:
    """(a*(b*c)) \\ ((a*b)*c); zero exactly where the triple associates."""
    return loop.ldiv(loop.mul(a, loop.mul(b, c)), loop.mul(loop.mul(a, b), c))


def commutator(loop: LoopLaw, a, b) -> Array:
    """(a*b) \\ (b*a)."""
    return loop.ldiv(loop.mul(a, b), loop.mul(b, a))


def _central_residual(loop: LoopLaw, z: Array, X: Array, Y: Array) -> tuple[float, str, int]:
    Z = np.broadcast_to(np.asarray(z, float).reshape(3, -1), X.shape)
    m = loop.mul
    checks = {
        "zx.y = z.xy": m(m(Z, X), Y) - m(Z, m(X, Y)),
        "x.yz = xy.z": m(X, m(Y, Z)) - m(m(X, Y), Z),
        "xz.y = x.zy": m(m(X, Z), Y) - m(X, m(Z, Y)),
        "zx = xz": m(Z, X) - m(X, Z),
    }
    worst = (-1.0, "", 0)
    for name, d in checks.items():
        col = np.max(np.abs(d), axis=0)
        i = int(np.argmax(col))
        if col[i] > worst[0]:
            worst = (float(col[i]), name, i)
    return worst


def is_central(loop: LoopLaw, z, points: Array | None = None, *, seed: int = DEFAULT_SEED,
               tol: float = TAU_LOOP) -> bool:
    return central_report(loop, z, points, seed=seed, tol=tol).passed


def central_report(loop: LoopLaw, z, points: Array | None = None, *, seed: int = DEFAULT_SEED,
                   tol: float = TAU_LOOP) -> Report:
    P = default_points(seed=seed) if points is None else np.asarray(points, float)
    (Q,) = _partners(P, 1, seed)
    worst, name, i = _central_residual(loop, z, P, Q)
    rep = Report("central", loop.name, worst < tol, worst, tol, params={"z": [float(v) for v in np.ravel(z)]})
    rep.witness(f"x ({name})", P[:, i])
    rep.witness("y", Q[:, i])
    return rep


def _off_line(v: Array, d: Array) -> Array:
    """Distance of each column of v from the line R d."""
    d = d / np.linalg.norm(d)
    return np.max(np.abs(v - np.outer(d, d @ v)), axis=0)


def nilpotency_class2_check(loop: LoopLaw, central_dir: Sequence[float], points: Array | None = None, *,
                            seed: int = DEFAULT_SEED, tol: float = TAU_LOOP,
                            scales: Sequence[float] = (-2.0, -0.5, 1.0, 3.0)) -> Report:
    """Evidence for central nilpotency of class 2 along a given central line.

    Passes iff multiples of ``central_dir`` are central, and all associators
    and commutators of sampled triples lie on that line.  ``params['class']``
    is 1 when every associator and commutator vanishes, 2 on a pass with a
    nonzero associator (kept as the properness witness) and None on failure.
    """
    P = default_points(seed=seed) if points is None else np.asarray(points, float)
    d = np.asarray(central_dir, float)
    B, C = _partners(P, 2, seed)
    rep = Report("nilpotency_class2", loop.name, False, 0.0, tol,
                 params={**loop.params, "central_dir": d.tolist()})
    worst = 0.0
    for s in scales:
        r, name, i = _central_residual(loop, s * d, P, B)
        if r > worst:
            worst = r
            rep.witnesses = [(f"{s:g}*dir not central ({name}) at x", P[:, i].tolist())]
    assoc = associator(loop, P, B, C)
    comm = commutator(loop, P, B)
    off_a = _off_line(assoc, d)
    off_c = _off_line(comm, d)
    ia, ic = int(np.argmax(off_a)), int(np.argmax(off_c))
    if off_a[ia] > worst:
        worst = float(off_a[ia])
        rep.witnesses = [("associator off the central line", assoc[:, ia].tolist()),
                         ("a, b, c", np.concatenate([P[:, ia], B[:, ia], C[:, ia]]).tolist())]
    if off_c[ic] > worst:
        worst = float(off_c[ic])
        rep.witnesses = [("commutator off the central line", comm[:, ic].tolist()),
                         ("a, b", np.concatenate([P[:, ic], B[:, ic]]).tolist())]
    rep.max_residual = worst
    rep.passed = worst < tol
    size = np.max(np.abs(assoc), axis=0)
    j = int(np.argmax(size))
    trivial = size[j] < tol and np.max(np.abs(comm)) < tol
    rep.params["class"] = (1 if trivial else 2) if rep.passed else None
    rep.params["max_associator"] = float(size[j])
    if rep.passed and not trivial:
        rep.witness("properness: associator", assoc[:, j])
        rep.witness("properness: a, b, c", np.concatenate([P[:, j], B[:, j], C[:, j]]))
    return rep


def associator_report(loop: LoopLaw, points: Array | None = None, *, seed: int = DEFAULT_SEED,
                      tol: float = TAU_LOOP) -> Report:
    """Largest associator over sampled triples; passes when it is below ``tol`` (group case)."""
    P = default_points(seed=seed) if points is None else np.asarray(points, float)
    B, C = _partners(P, 2, seed)
    size = np.max(np.abs(associator(loop, P, B, C)), axis=0)
    j = int(np.argmax(size))
    rep = Report("associativity", loop.name, float(size[j]) < tol, float(size[j]), tol, params=dict(loop.params))
    rep.witness("a, b, c", np.concatenate([P[:, j], B[:, j], C[:, j]]))
    return rep


# --- the functional-equation lemmas -------------------------------------------------


@dataclass(frozen=True)
class IndependentOfZ:
    max_dfdz: float


@dataclass(frozen=True)
class Witness:
    u: float
    x0: float
    y0: float
    z1: float
    z2: float
    residual: float


def bijectivity_witness(f: Func, *, tol: float = TAU_LOOP, probe: Sequence[float] = (-1.0, 0.0, 1.0),
                        us: Sequence[float] = (1, -1, 2, -2, 0.5, -0.5, 4, -4, 10, -10)) -> IndependentOfZ | Witness:
    """Certify z-independence of f, or find z1 != z2 with equal z + u f(x0, y0, z)."""
    F = _compile(f, "xyz", "f")
    pr = np.asarray(probe, float)
    X, Y, Z = np.meshgrid(pr, pr, np.linspace(-3, 3, 13), indexing="ij")
    h = 1e-5
    dz = np.max(np.abs((F(X, Y, Z + h) - F(X, Y, Z - h)) / (2 * h)))
    if dz < 1e-6:
        return IndependentOfZ(float(dz))
    # (0, 0) first, then the remaining probe pairs
    bases = [(0.0, 0.0)] + [(float(a), float(b)) for a in pr for b in pr if (a, b) != (0.0, 0.0)]
    z1s = np.array([0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5])
    for u in us:
        for x0, y0 in bases:
            def g(idx, t):
                z1 = z1s[idx][:, None]
                return (t + u * F(x0 + 0 * t, y0 + 0 * t, t)) - (z1 + u * F(x0 + 0 * z1, y0 + 0 * z1, z1))

            res = scan_roots(g, z1s.size)
            for i, z1 in enumerate(z1s):
                for z2 in res.roots[i][np.isfinite(res.roots[i])]:
                    if abs(z2 - z1) > 1e-6:
                        val = abs(z1 + u * F(np.array([x0]), np.array([y0]), np.array([z1]))[0]
                                  - z2 - u * F(np.array([x0]), np.array([y0]), np.array([z2]))[0])
                        if val < tol:
                            return Witness(float(u), x0, y0, float(z1), float(np.round(z2, 12)), float(val))
    return IndependentOfZ(float("nan"))


def functional_residual(f: Func, pairs: Array | None = None, *, seed: int = DEFAULT_SEED, n: int = 200) -> float:
    """max |f(z2) + e^{-z2} f(z1) - f(z1 + z2)| over the pairs (shape (2, N))."""
    F = _compile(f, "z", "f")
    if pairs is None:
        pairs = rng(seed).uniform(-2, 2, (2, n))
    z1, z2 = np.asarray(pairs, float)
    return float(np.max(np.abs(F(z2) + _e(-z2) * F(z1) - F(z1 + z2))))


def fit_lemma_family(f: Func, grid: Array | None = None) -> tuple[float, float]:
    """Least-squares c for f(z) ~ c(1 - e^{-z}); returns (c, max residual)."""
    F = _compile(f, "z", "f")
    z = np.linspace(-2, 2, 41) if grid is None else np.asarray(grid, float)
    basis = 1 - _e(-z)
    y = F(z)
    c = float(basis @ y / (basis @ basis))
    return c, float(np.max(np.abs(y - c * basis)))


__all__ = [
    "FAMILIES", "FNotNormalized", "HNotNormalized", "IndependentOfZ", "LoopLaw", "SectionLoop", "Witness",
    "associator", "associator_report", "axioms_check", "bijectivity_witness", "case_section", "central_report",
    "commutator", "default_points", "family_a", "family_b", "family_c", "family_d", "family_section",
    "fit_lemma_family", "functional_residual", "get_family", "h_subgroup", "is_central", "loop_from_section",
    "nilpotency_class2_check", "section_invariants",
]

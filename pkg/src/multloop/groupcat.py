"""Closed-form coordinate group laws on R^n and their tangent algebras.

Group elements are numpy arrays of shape (n,) or, for batches, (n, N); every
law is written against the leading axis so both work unchanged.  All laws
use the identity-at-origin convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from . import liealg
from .numerics import TAU_FD, TAU_GRP, mixed_second, to_rational

Array = np.ndarray


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class GroupLaw:
    name: str
    dim: int
    mul: Callable[[Array, Array], Array]
    inv: Callable[[Array], Array]
    lie_algebra_ref: str
    # rows: the reference algebra's basis written in coordinate tangent vectors
    basis: tuple[tuple[int, ...], ...]
    params: Mapping[str, float] = field(default_factory=dict)
    coords: str = ""
    description: str = ""

    @property
    def identity(self) -> Array:
        return np.zeros(self.dim)

    def reference_algebra(self) -> liealg.LieAlgebra:
        if self.params:
            return liealg.get(self.lie_algebra_ref, **{k: Fraction(v) for k, v in self.params.items()})
        return liealg.get(self.lie_algebra_ref)

    def to_algebra_coords(self, v: Sequence) -> tuple[Fraction, ...]:
        """Express a coordinate tangent vector in the reference algebra's basis."""
        p = [[Fraction(x) for x in row] for row in self.basis]
        pinv = liealg.inverse(p)
        v = [Fraction(x) for x in v]
        n = self.dim
        return tuple(sum(v[i] * pinv[i][a] for i in range(n)) for a in range(n))


def _check(law: GroupLaw, *xs: Array) -> list[Array]:
    out = []
    for x in xs:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != law.dim:
            raise DimensionMismatch(f"{law.name} expects {law.dim} coordinates, got {x.shape[0]}")
        out.append(x)
    return out


def g_mul(law: GroupLaw, a, b) -> Array:
    a, b = _check(law, a, b)
    return law.mul(a, b)


def g_inv(law: GroupLaw, a) -> Array:
    (a,) = _check(law, a)
    return law.inv(a)


def g_comm(law: GroupLaw, a, b) -> Array:
    """a^-1 b^-1 a b."""
    a, b = _check(law, a, b)
    return law.mul(law.mul(law.inv(a), law.inv(b)), law.mul(a, b))


# --- the laws ---------------------------------------------------------------

_e = np.exp


def _stack(*cols):
    cols = np.broadcast_arrays(*cols)
    return np.stack(cols)


def _z(x):
    return np.zeros_like(x)


def _rot(x1, y1, w, z):
    """(x1, y1) times e^w [[cos z, sin z], [-sin z, cos z]] (row vector)."""
    c, s, f = np.cos(z), np.sin(z), _e(w)
    return f * (x1 * c - y1 * s), f * (x1 * s + y1 * c)


def _rot_inv(x, y, w, z):
    """-(x, y) times the inverse of e^w Rot(z)."""
    c, s, f = np.cos(z), np.sin(z), _e(-w)
    return -f * (x * c + y * s), -f * (-x * s + y * c)


def _signed(n: int, flips: Sequence[int] = (), perm: Sequence[int] | None = None) -> tuple:
    """Basis rows: row a is e_{perm[a]} with sign -1 for 1-based a in ``flips``."""
    perm = perm or list(range(1, n + 1))
    rows = []
    for a in range(n):
        row = [0] * n
        row[perm[a] - 1] = -1 if (a + 1) in flips else 1
        rows.append(tuple(row))
    return tuple(rows)


def law_g43() -> GroupLaw:
    def mul(x, y):
        return _stack(x[0] + y[0] * _e(x[3]), x[1] + y[1] + x[3] * y[2], x[2] + y[2], x[3] + y[3])

    def inv(x):
        return _stack(-x[0] * _e(-x[3]), -x[1] + x[3] * x[2], -x[2], -x[3])

    return GroupLaw("g43", 4, mul, inv, "g4_3", _signed(4, [4]), coords="x1,x2,x3,x4",
                    description="4-dim group generated by the left translations of the family a)-d) loops")


def law_r2_l2() -> GroupLaw:
    def mul(x, y):
        return _stack(x[0] + y[0], x[1] + y[1], x[2] + y[2], y[3] + x[3] * _e(y[2]))

    def inv(x):
        return _stack(-x[0], -x[1], -x[2], -x[3] * _e(-x[2]))

    return GroupLaw("r2_l2", 4, mul, inv, "r2_l2", _signed(4), coords="x1,x2,x3,x4",
                    description="R^2 x L_2, the decomposable 4-dim candidate")


def law_l2() -> GroupLaw:
    def mul(x, y):
        return _stack(y[0] + x[0] * _e(y[1]), x[1] + y[1])

    def inv(x):
        return _stack(-x[0] * _e(-x[1]), -x[1])

    return GroupLaw("l2", 2, mul, inv, "l2", _signed(2), coords="x1,x2", description="L_2")


def law_f3() -> GroupLaw:
    def mul(x, y):
        return _stack(x[0] + y[0], x[1] + y[1], x[2] + y[2] - x[0] * y[1])

    def inv(x):
        return _stack(-x[0], -x[1], -x[2] - x[0] * x[1])

    return GroupLaw("f3", 3, mul, inv, "F3", _signed(3, [3]), coords="x1,x2,x3",
                    description="Heisenberg group F_3")


def law_abelian(n: int = 5) -> GroupLaw:
    return GroupLaw(f"r{n}", n, lambda x, y: x + y, lambda x: -x, f"R{n}", _signed(n),
                    coords=",".join(f"x{i}" for i in range(1, n + 1)), description=f"R^{n}")


def law_mult1() -> GroupLaw:
    def mul(x, y):
        return _stack(x[0] + y[0], x[1] + y[1], x[2] + y[2] - x[0] * y[1], y[3] + x[3] * _e(y[4]), x[4] + y[4])

    def inv(x):
        return _stack(-x[0], -x[1], -x[2] - x[0] * x[1], -x[3] * _e(-x[4]), -x[4])

    return GroupLaw("mult1", 5, mul, inv, "mult1", _signed(5, [3]), coords="x1,...,x5",
                    description="case 1: F_3 x L_2")


def law_mult2() -> GroupLaw:
    def mul(x, y):
        return _stack(y[0] + x[0] * _e(y[1]), x[1] + y[1], y[2] + x[2] * _e(y[3]), x[3] + y[3], x[4] + y[4])

    def inv(x):
        return _stack(-x[0] * _e(-x[1]), -x[1], -x[2] * _e(-x[3]), -x[3], -x[4])

    return GroupLaw("mult2", 5, mul, inv, "mult2", _signed(5), coords="x1,...,x5",
                    description="case 2: L_2 x L_2 x R")


def law_mult3() -> GroupLaw:
    # coordinates (z, y, x, w, q)
    def mul(a, b):
        z1, y1, x1, w1, q1 = a
        z2, y2, x2, w2, q2 = b
        return _stack(z1 + _e(w1) * z2 - x1 * _e(w1) * y2, y1 + _e(w1) * y2, x1 + x2, w1 + w2, q1 + q2)

    def inv(a):
        z, y, x, w, q = a
        return _stack(-_e(-w) * (z + x * y), -y * _e(-w), -x, -w, -q)

    return GroupLaw("mult3", 5, mul, inv, "mult3", _signed(5, [4]), coords="z,y,x,w,q",
                    description="case 3")


def law_mult4() -> GroupLaw:
    # coordinates (x, y, w, z, u): 4x4 matrix group with a rotation-dilation block
    def mul(a, b):
        x1, y1, w1, z1, u1 = a
        x2, y2, w2, z2, u2 = b
        rx, ry = _rot(x1, y1, w2, z2)
        return _stack(x2 + rx, y2 + ry, w1 + w2, z1 + z2, u1 + u2)

    def inv(a):
        x, y, w, z, u = a
        ix, iy = _rot_inv(x, y, w, z)
        return _stack(ix, iy, -w, -z, -u)

    return GroupLaw("mult4", 5, mul, inv, "mult4", _signed(5, [4]), coords="x,y,w,z,u",
                    description="case 4: matrix group")


def law_mult5() -> GroupLaw:
    def mul(x, y):
        f = _e(y[2])
        return _stack(y[0] + x[0] * f, y[1] + x[1] * f + x[0] * y[2] * f, x[2] + y[2], x[3] + y[3], x[4] + y[4])

    def inv(x):
        f = _e(-x[2])
        return _stack(-x[0] * f, f * (-x[1] + x[0] * x[2]), -x[2], -x[3], -x[4])

    return GroupLaw("mult5", 5, mul, inv, "mult5", _signed(5), coords="x1,...,x5",
                    description="case 5: R^2 times the 3-dim group with one 1-dim normal subgroup")


def _mult6_law(name: str, ref: str, a: float) -> GroupLaw:
    # coordinates (x, y, z, u, v); the block is e^{a z} Rot(z)
    def mul(p, q):
        x1, y1, z1, u1, v1 = p
        x2, y2, z2, u2, v2 = q
        rx, ry = _rot(x1, y1, a * z2, z2)
        return _stack(x2 + rx, y2 + ry, z1 + z2, u1 + u2, v1 + v2)

    def inv(p):
        x, y, z, u, v = p
        ix, iy = _rot_inv(x, y, a * z, z)
        return _stack(ix, iy, -z, -u, -v)

    return GroupLaw(name, 5, mul, inv, ref, _signed(5, [2]), {"a": a}, coords="x,y,z,u,v",
                    description="case 6: matrix group with block e^{az} Rot(z)")


def law_mult6(a: float = 1.0) -> GroupLaw:
    if not a > 0:
        raise ValueError("case 6 requires a > 0")
    return _mult6_law("mult6", "mult6", a)


def law_euclid() -> GroupLaw:
    """R^2 times the orientation preserving motions of the plane (a = 0)."""
    law = _mult6_law("euclid", "euclid", 0.0)
    return GroupLaw(law.name, 5, law.mul, law.inv, "euclid", law.basis, {}, law.coords,
                    "R^2 x E(2)^+, the a = 0 member of the case 6 formula")


def law_mult7(a: float = 1.0, b: float = 2.0, name: str = "mult7") -> GroupLaw:
    def mul(x, y):
        return _stack(y[0] + x[0] * _e(a * y[2]), y[1] + x[1] * _e(b * y[2]), x[2] + y[2], x[3] + y[3], x[4] + y[4])

    def inv(x):
        return _stack(-x[0] * _e(-a * x[2]), -x[1] * _e(-b * x[2]), -x[2], -x[3], -x[4])

    if name == "mult8":
        return GroupLaw(name, 5, mul, inv, "mult8", _signed(5), {"a": a}, coords="x1,...,x5",
                        description="case 8: the case 7 formula with a = b")
    return GroupLaw(name, 5, mul, inv, "mult7", _signed(5), {"a": a, "b": b}, coords="x1,...,x5",
                    description="case 7: R^2 times the 3-dim group with two 1-dim normal subgroups")


def law_mult8(a: float = 1.0) -> GroupLaw:
    return law_mult7(a, a, name="mult8")


def law_G1() -> GroupLaw:
    # coordinates (x, y, z, q, w)
    def mul(p, r):
        x1, y1, z1, q1, w1 = p
        x2, y2, z2, q2, w2 = r
        return _stack(x1 + w1 * y2 + w1**2 * z2 / 2 + x2, y1 + w1 * z2 + y2, z1 + z2, q1 + _e(z1) * q2, w1 + w2)

    def inv(p):
        x, y, z, q, w = p
        return _stack(-x + w * y - w**2 * z / 2, -y + w * z, -z, -q * _e(-z), -w)

    basis = ((-1, 0, 0, 0, 0), (0, 0, 0, 0, 1), (0, -1, 0, 0, 0), (0, 0, 0, 1, 0), (0, 0, -1, 0, 0))
    return GroupLaw("G_1", 5, mul, inv, "g_1", basis, coords="x,y,z,q,w",
                    description="5-dim group with 1-dim centre, algebra g_1")


def law_G2() -> GroupLaw:
    # coordinates (q, x, y, z, w)
    def mul(p, r):
        q1, x1, y1, z1, w1 = p
        q2, x2, y2, z2, w2 = r
        return _stack(q1 + _e(w1) * q2 + x1 * z2, x1 + _e(w1) * x2, y1 + w1 * z2 + y2, z1 + z2, w1 + w2)

    def inv(p):
        q, x, y, z, w = p
        return _stack(_e(-w) * (-q + x * z), -x * _e(-w), -y + w * z, -z, -w)

    return GroupLaw("G_2", 5, mul, inv, "g_2", _signed(5, [5]), coords="q,x,y,z,w",
                    description="5-dim group with 1-dim centre, algebra g_2")


def law_G3() -> GroupLaw:
    def mul(p, r):
        q1, x1, y1, z1, w1 = p
        q2, x2, y2, z2, w2 = r
        return _stack(q1 + _e(z1) * q2, x1 + _e(w1) * x2, y1 + w1 * z2 + y2, z1 + z2, w1 + w2)

    def inv(p):
        q, x, y, z, w = p
        return _stack(-q * _e(-z), -x * _e(-w), -y + w * z, -z, -w)

    return GroupLaw("G_3", 5, mul, inv, "g_3", _signed(5, [3, 4, 5]), coords="q,x,y,z,w",
                    description="5-dim group with 1-dim centre, algebra g_3")


def law_G4() -> GroupLaw:
    # coordinates (x, y, q, w, z)
    def mul(p, r):
        x1, y1, q1, w1, z1 = p
        x2, y2, q2, w2, z2 = r
        rx, ry = _rot(x1, y1, w2, z2)
        return _stack(x2 + rx, y2 + ry, q1 + q2 - w1 * z2, w1 + w2, z1 + z2)

    def inv(p):
        x, y, q, w, z = p
        ix, iy = _rot_inv(x, y, w, z)
        return _stack(ix, iy, -q - w * z, -w, -z)

    return GroupLaw("G_4", 5, mul, inv, "g_4", _signed(5, [5]), coords="x,y,q,w,z",
                    description="5-dim matrix group with 1-dim centre, algebra g_4")


LAW_FACTORIES: dict[str, Callable[..., GroupLaw]] = {
    "g43": law_g43,
    "r2_l2": law_r2_l2,
    "l2": law_l2,
    "f3": law_f3,
    "r5": law_abelian,
    "mult1": law_mult1,
    "mult2": law_mult2,
    "mult3": law_mult3,
    "mult4": law_mult4,
    "mult5": law_mult5,
    "mult6": law_mult6,
    "mult7": law_mult7,
    "mult8": law_mult8,
    "euclid": law_euclid,
    "G_1": law_G1,
    "G_2": law_G2,
    "G_3": law_G3,
    "G_4": law_G4,
}


def get_law(name: str, **params) -> GroupLaw:
    try:
        factory = LAW_FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown group law {name!r}") from None
    return factory(**params)


def all_laws() -> list[GroupLaw]:
    return [f() for f in LAW_FACTORIES.values()]


# --- tangent algebra ----------------------------------------------------------


def raw_structure_constants(law: GroupLaw, h: float = 1e-3, tol: float = TAU_FD) -> np.ndarray:
    """c[i, j, :] = d^2/ds dt comm(s e_i, t e_j) at 0, in coordinate basis."""
    n = law.dim
    basis = np.eye(n)
    c = np.zeros((n, n, n))
    for i in range(n):
        for j in range(i + 1, n):
            def F(s, t, i=i, j=j):
                return law.mul(law.mul(law.inv(s * basis[i]), law.inv(t * basis[j])),
                               law.mul(s * basis[i], t * basis[j]))

            c[i, j] = mixed_second(F, h, tol)
            c[j, i] = -c[i, j]
    return c


def tangent_algebra(law: GroupLaw, raw: bool = False, max_den: int = 12) -> liealg.LieAlgebra:
    """Rational-rounded tangent algebra, in the reference basis unless ``raw``."""
    c = raw_structure_constants(law)
    n = law.dim
    table = tuple(tuple(tuple(to_rational(c[i, j, k], max_den) for k in range(n)) for j in range(n))
                  for i in range(n))
    alg = liealg.LieAlgebra(f"T({law.name})", n, table)
    if raw:
        return alg
    return liealg.change_basis(alg, law.basis, name=f"T({law.name})")


def tangent_rounding_error(law: GroupLaw) -> float:
    c = raw_structure_constants(law)
    return float(np.max(np.abs(c - np.vectorize(lambda x: float(to_rational(x)))(c)))) if c.size else 0.0


# --- subgroups ---------------------------------------------------------------


@dataclass(frozen=True)
class SubgroupSpec:
    """A k-dim coordinate-slice subgroup S with coset coordinates on G/S.

    ``equations(g)`` returns the defining relations (each zero on S) stacked
    along the first axis; ``coset_coords`` is constant on left cosets g S and
    ``lift`` is a right inverse of it.
    """

    name: str
    law: GroupLaw
    k: int
    parametrization: Callable[[Array], Array]
    equations: Callable[[Array], Array]
    coset_coords: Callable[[Array], Array]
    lift: Callable[[Array], Array]
    tangent: tuple[tuple[int, ...], ...]  # coordinate tangent vectors spanning the Lie algebra
    relations: str = ""

    def residual(self, g: Array) -> Array:
        return np.max(np.abs(np.asarray(self.equations(np.asarray(g, float)))), axis=0)

    def algebra_subspace(self) -> liealg.Subspace:
        vecs = [self.law.to_algebra_coords(v) for v in self.tangent]
        return liealg.Subspace.span(vecs, self.law.dim)


def subgroup_member(spec: SubgroupSpec, g, tol: float = TAU_GRP) -> bool | np.ndarray:
    r = spec.residual(g)
    return bool(r < tol) if np.ndim(r) == 0 else r < tol


# --- axiom checks --------------------------------------------------------------


def law_axioms(law: GroupLaw, n: int = 1000, box: float = 2.0, seed: int | None = None) -> dict[str, float]:
    """Max residuals of associativity, identity and inverse on seeded samples in [-box, box]^n."""
    from .numerics import DEFAULT_SEED, rng

    r = rng(DEFAULT_SEED if seed is None else seed)
    a, b, c = (r.uniform(-box, box, (law.dim, n)) for _ in range(3))
    e = np.zeros_like(a)
    ia = law.inv(a)

    def worst(d):
        return float(np.max(np.abs(d)))

    return {
        "associativity": worst(law.mul(law.mul(a, b), c) - law.mul(a, law.mul(b, c))),
        "left identity": worst(law.mul(e, a) - a),
        "right identity": worst(law.mul(a, e) - a),
        "right inverse": worst(law.mul(a, ia)),
        "left inverse": worst(law.mul(ia, a)),
    }

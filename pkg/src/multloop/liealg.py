"""Exact structure-constant Lie algebras over the rationals.

Vectors are tuples of :class:`fractions.Fraction`.  Basis indices in the
public constructors are 1-based to match the usual e_1..e_n notation; the
internal tables are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

Rational = Fraction
Vector = tuple[Fraction, ...]

MAX_DIM = 6
STUB_FLAG = "relations-unstated"


class NotSubalgebra(ValueError):
    pass


class NotIdeal(ValueError):
    pass


# --- exact linear algebra -------------------------------------------------


def _vec(v: Iterable, n: int | None = None) -> Vector:
    out = tuple(Fraction(x) for x in v)
    if n is not None and len(out) != n:
        raise ValueError(f"expected a vector of length {n}, got {len(out)}")
    return out


def rref(rows: Iterable[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        piv = m[r][col]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    """Basis of {x : row . x = 0 for every row}."""
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve_rows(matrix: Sequence[Sequence[Fraction]], v: Sequence[Fraction]) -> Vector:
    """Coefficients w with sum_a w[a] * matrix[a] = v (rows independent)."""
    k = len(matrix)
    n = len(v)
    # columns of the augmented system are the rows of ``matrix``
    aug = [[Fraction(matrix[a][i]) for a in range(k)] + [Fraction(v[i])] for i in range(n)]
    red, pivots = rref(aug, k + 1)
    if k in pivots:
        raise ValueError("vector is not in the row span")
    if len(pivots) < k:
        raise ValueError("rows are linearly dependent")
    w = [Fraction(0)] * k
    for row, p in zip(red, pivots):
        w[p] = row[k]
    return tuple(w)


def inverse(matrix: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    n = len(matrix)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    red, pivots = rref(aug, 2 * n)
    if pivots[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


# --- subspaces ------------------------------------------------------------


@dataclass(frozen=True)
class Subspace:
    """A linear subspace held as its reduced row-echelon basis."""

    ambient_dim: int
    basis: tuple[Vector, ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "Subspace":
        rows = [_vec(v, ambient_dim) for v in vectors]
        red, _ = rref(rows, ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def whole(cls, n: int) -> "Subspace":
        return cls.span(unit_vectors(n), n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, v: Sequence) -> bool:
        v = _vec(v, self.ambient_dim)
        return Subspace.span(self.basis + (v,), self.ambient_dim).dim == self.dim

    def issubset(self, other: "Subspace") -> bool:
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.basis + other.basis, self.ambient_dim)

    def annihilator(self) -> list[Vector]:
        """Linear functionals (as vectors) vanishing on the subspace."""
        return nullspace(self.basis, self.ambient_dim)

    def __repr__(self) -> str:
        rows = ", ".join("(" + ", ".join(str(x) for x in b) + ")" for b in self.basis)
        return f"Subspace({self.ambient_dim}; {rows})"


def unit_vectors(n: int) -> list[Vector]:
    return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]


def e(i: int, n: int) -> Vector:
    """Basis vector e_i (1-based) of Q^n."""
    return unit_vectors(n)[i - 1]


# --- Lie algebras ---------------------------------------------------------


def _zero_table(n: int) -> list[list[list[Fraction]]]:
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


def _freeze(c) -> tuple:
    return tuple(tuple(tuple(k) for k in row) for row in c)


@dataclass(frozen=True)
class LieAlgebra:
    """Structure constants c[i][j][k] with [e_i, e_j] = sum_k c[i][j][k] e_k.

    Equality compares dimension and constants only, so two catalog names
    for the same table compare equal.
    """

    name: str = field(compare=False)
    dim: int
    c: tuple
    params: Mapping[str, Fraction] = field(default_factory=dict, compare=False)
    flags: frozenset = field(default_factory=frozenset, compare=False)

    @classmethod
    def from_brackets(cls, name: str, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]],
                      params: Mapping[str, object] | None = None, flags: Iterable[str] = ()) -> "LieAlgebra":
        """Build from 1-based relations ``{(i, j): {k: coeff}}``, filling in antisymmetry."""
        if not 0 <= dim <= MAX_DIM:
            raise ValueError(f"dimension {dim} outside 0..{MAX_DIM}")
        c = _zero_table(dim)
        for (i, j), terms in brackets.items():
            if i == j:
                raise ValueError(f"[e{i}, e{i}] must vanish")
            for k, coeff in terms.items():
                q = Fraction(coeff)
                c[i - 1][j - 1][k - 1] += q
                c[j - 1][i - 1][k - 1] -= q
        ps = {k: Fraction(v) for k, v in (params or {}).items()}
        return cls(name, dim, _freeze(c), ps, frozenset(flags))

    @classmethod
    def abelian(cls, n: int) -> "LieAlgebra":
        return cls.from_brackets(f"R{n}", n, {})

    @property
    def is_stub(self) -> bool:
        return STUB_FLAG in self.flags

    def relations(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        """Nonzero brackets with i < j, 1-based."""
        out = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                terms = {k + 1: q for k, q in enumerate(self.c[i][j]) if q != 0}
                if terms:
                    out[(i + 1, j + 1)] = terms
        return out

    def renamed(self, name: str, **kw) -> "LieAlgebra":
        return LieAlgebra(name, self.dim, self.c, kw.get("params", self.params), kw.get("flags", self.flags))


def bracket(alg: LieAlgebra, x: Sequence, y: Sequence) -> Vector:
    n = alg.dim
    if len(x) != n or len(y) != n:
        raise ValueError(f"vectors must have length {n}")
    x = _vec(x)
    y = _vec(y)
    out = [Fraction(0)] * n
    for i, xi in enumerate(x):
        if xi == 0:
            continue
        for j, yj in enumerate(y):
            if yj == 0:
                continue
            w = xi * yj
            for k, q in enumerate(alg.c[i][j]):
                if q:
                    out[k] += w * q
    return tuple(out)


def antisymmetry_defect(alg: LieAlgebra) -> int:
    """Number of (i, j, k) with c[i][j][k] != -c[j][i][k]."""
    n = alg.dim
    return sum(alg.c[i][j][k] != -alg.c[j][i][k] for i in range(n) for j in range(n) for k in range(n))


def jacobi_check(alg: LieAlgebra) -> bool:
    """True iff the table is antisymmetric and satisfies Jacobi exactly."""
    if antisymmetry_defect(alg):
        return False
    n = alg.dim
    c = alg.c
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(n):
                    s = sum(c[i][j][m] * c[m][k][l] + c[j][k][m] * c[m][i][l] + c[k][i][m] * c[m][j][l]
                            for m in range(n))
                    if s != 0:
                        return False
    return True


def _bracket_span(alg: LieAlgebra, a: Subspace, b: Subspace) -> Subspace:
    return Subspace.span([bracket(alg, u, v) for u in a.basis for v in b.basis], alg.dim)


def whole(alg: LieAlgebra) -> Subspace:
    return Subspace.whole(alg.dim)


def commutator_ideal(alg: LieAlgebra) -> Subspace:
    w = whole(alg)
    return _bracket_span(alg, w, w)


def center(alg: LieAlgebra) -> Subspace:
    n = alg.dim
    # x is central iff sum_i x_i c[i][j][k] = 0 for all j, k
    rows = [[alg.c[i][j][k] for i in range(n)] for j in range(n) for k in range(n)]
    return Subspace.span(nullspace(rows, n), n)


class Series(NamedTuple):
    spaces: list[Subspace]
    dims: list[int]
    reaches_zero: bool
    length: int | None  # steps to reach 0 (derived length / nilpotency class)


def series(alg: LieAlgebra, kind: str) -> Series:
    """Derived or lower central series, stopped at the first repeated term."""
    if kind not in ("derived", "lower_central"):
        raise ValueError(f"unknown series kind {kind!r}")
    w = whole(alg)
    chain = [w]
    while True:
        cur = chain[-1]
        nxt = _bracket_span(alg, cur, cur) if kind == "derived" else _bracket_span(alg, w, cur)
        if nxt == cur:
            break
        chain.append(nxt)
        if nxt.dim == 0:
            break
    dims = [s.dim for s in chain]
    zero = dims[-1] == 0
    return Series(chain, dims, zero, len(chain) - 1 if zero else None)


def is_solvable(alg: LieAlgebra) -> bool:
    return series(alg, "derived").reaches_zero


def is_nilpotent(alg: LieAlgebra) -> bool:
    return series(alg, "lower_central").reaches_zero


def nilpotency_class(alg: LieAlgebra) -> int | None:
    return series(alg, "lower_central").length


def is_subalgebra(alg: LieAlgebra, s: Subspace) -> bool:
    return _bracket_span(alg, s, s).issubset(s)


def is_ideal(alg: LieAlgebra, s: Subspace) -> bool:
    if s.ambient_dim != alg.dim:
        raise ValueError("subspace lives in the wrong ambient space")
    return _bracket_span(alg, whole(alg), s).issubset(s)


def normalizer(alg: LieAlgebra, s: Subspace) -> Subspace:
    if not is_subalgebra(alg, s):
        raise NotSubalgebra("bracket(s, s) is not contained in s")
    n = alg.dim
    ann = s.annihilator()
    basis = unit_vectors(n)
    # phi([x, b]) = sum_i x_i phi([e_i, b]) must vanish for each functional phi
    rows = []
    for b in s.basis:
        cols = [bracket(alg, basis[i], b) for i in range(n)]
        for phi in ann:
            rows.append([sum(p * v for p, v in zip(phi, cols[i])) for i in range(n)])
    return Subspace.span(nullspace(rows, n), n)


def quotient(alg: LieAlgebra, ideal: Subspace, complement: Sequence[Sequence] | None = None,
             name: str | None = None) -> LieAlgebra:
    """Structure constants of alg/ideal on a complement basis.

    By default the complement is spanned by the unit vectors at the
    non-pivot columns of the ideal's echelon basis.
    """
    if not is_ideal(alg, ideal):
        raise NotIdeal("subspace is not an ideal")
    n = alg.dim
    if complement is None:
        _, piv = rref(ideal.basis, n)
        comp = [u for i, u in enumerate(unit_vectors(n)) if i not in piv]
    else:
        comp = [_vec(v, n) for v in complement]
    k = len(comp)
    frame = comp + list(ideal.basis)
    if len(frame) != n or Subspace.span(frame, n).dim != n:
        raise ValueError("complement does not complete the ideal to a basis")
    c = _zero_table(k)
    for a in range(k):
        for b in range(k):
            w = solve_rows(frame, bracket(alg, comp[a], comp[b]))
            c[a][b] = list(w[:k])
    return LieAlgebra(name or f"{alg.name}/ideal", k, _freeze(c), dict(alg.params))


class Fingerprint(NamedTuple):
    dim: int
    derived: tuple[int, ...]
    lower_central: tuple[int, ...]
    center_dim: int
    commutator_dim: int
    commutator_abelian: bool


def fingerprint(alg: LieAlgebra) -> Fingerprint:
    g1 = commutator_ideal(alg)
    return Fingerprint(
        alg.dim,
        tuple(series(alg, "derived").dims),
        tuple(series(alg, "lower_central").dims),
        center(alg).dim,
        g1.dim,
        _bracket_span(alg, g1, g1).dim == 0,
    )


def direct_sum(a: LieAlgebra, b: LieAlgebra, name: str | None = None) -> LieAlgebra:
    n = a.dim + b.dim
    c = _zero_table(n)
    for i in range(a.dim):
        for j in range(a.dim):
            for k in range(a.dim):
                c[i][j][k] = a.c[i][j][k]
    s = a.dim
    for i in range(b.dim):
        for j in range(b.dim):
            for k in range(b.dim):
                c[s + i][s + j][s + k] = b.c[i][j][k]
    return LieAlgebra(name or f"{a.name}+{b.name}", n, _freeze(c), {**a.params, **b.params})


def change_basis(alg: LieAlgebra, p: Sequence[Sequence], name: str | None = None) -> LieAlgebra:
    """Constants in the basis f_a = sum_i p[a][i] e_i."""
    n = alg.dim
    rows = [_vec(r, n) for r in p]
    if len(rows) != n:
        raise ValueError("basis change must be square")
    pinv = inverse(rows)
    c = _zero_table(n)
    for a in range(n):
        for b in range(n):
            v = bracket(alg, rows[a], rows[b])
            # v = sum_c w_c f_c  =>  w = v . p^{-1}
            c[a][b] = [sum(v[i] * pinv[i][cc] for i in range(n)) for cc in range(n)]
    return LieAlgebra(name or alg.name, n, _freeze(c), dict(alg.params), alg.flags)


# --- text serialization ---------------------------------------------------
#
# One record per line:   name; dim; [i,j,k]=p/q; ...; params: a=p/q, b=p/q [; flags: f1, f2]
# Brackets are listed for i < j only (antisymmetry implied), sorted by (i, j, k),
# zero constants omitted, indices 1-based.  Blank lines and '#' comments are ignored.


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_algebra(alg: LieAlgebra) -> str:
    fields = [alg.name, str(alg.dim)]
    for (i, j), terms in sorted(alg.relations().items()):
        for k, q in sorted(terms.items()):
            fields.append(f"[{i},{j},{k}]={_fmt(q)}")
    items = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(alg.params.items()))
    fields.append("params:" + (" " + items if items else ""))
    if alg.flags:
        fields.append("flags: " + ", ".join(sorted(alg.flags)))
    return "; ".join(fields)


def parse_algebra(line: str) -> LieAlgebra:
    parts = [p.strip() for p in line.split(";")]
    if len(parts) < 3:
        raise ValueError(f"malformed record: {line!r}")
    name, dim = parts[0], int(parts[1])
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    params: dict[str, Fraction] = {}
    flags: list[str] = []
    for p in parts[2:]:
        if p.startswith("params:"):
            body = p[len("params:"):].strip()
            for item in filter(None, (s.strip() for s in body.split(","))):
                k, v = item.split("=")
                params[k.strip()] = Fraction(v.strip())
        elif p.startswith("flags:"):
            flags = [f.strip() for f in p[len("flags:"):].split(",") if f.strip()]
        elif p.startswith("["):
            idx, val = p.split("=")
            i, j, k = (int(t) for t in idx.strip("[]").split(","))
            if i >= j:
                raise ValueError(f"bracket indices must satisfy i < j: {p!r}")
            brackets.setdefault((i, j), {})[k] = Fraction(val)
        else:
            raise ValueError(f"unrecognised field {p!r}")
    return LieAlgebra.from_brackets(name, dim, brackets, params, flags)


def dumps(algs: Iterable[LieAlgebra]) -> str:
    return "".join(format_algebra(a) + "\n" for a in algs)


def loads(text: str) -> list[LieAlgebra]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(parse_algebra(line))
    return out


# --- catalog --------------------------------------------------------------


def _alg(name, dim, rels, params=None, flags=()):
    return LieAlgebra.from_brackets(name, dim, rels, params, flags)


def _stub(name, dim, params=None):
    return _alg(name, dim, {}, params, (STUB_FLAG,))


def l2() -> LieAlgebra:
    return _alg("l2", 2, {(1, 2): {1: 1}})


def filiform(n: int) -> LieAlgebra:
    """Elementary filiform F_n: [e1, e_i] = e_{i+1} for 2 <= i <= n-1."""
    if not 3 <= n <= MAX_DIM:
        raise ValueError("F_n needs 3 <= n <= 6")
    return _alg(f"F{n}", n, {(1, i): {i + 1: 1} for i in range(2, n)})


def g4_3() -> LieAlgebra:
    return _alg("g4_3", 4, {(1, 4): {1: 1}, (3, 4): {2: 1}})


def g4_10() -> LieAlgebra:
    return _alg("g4_10", 4, {(1, 3): {1: 1}, (2, 3): {2: 1}, (1, 4): {2: -1}, (2, 4): {1: 1}})


def g5_33(beta=1, gamma=0) -> LieAlgebra:
    beta, gamma = Fraction(beta), Fraction(gamma)
    if beta == 0 and gamma == 0:
        raise ValueError("g5_33 needs beta^2 + gamma^2 != 0")
    return _alg("g5_33", 5, {(1, 4): {1: 1}, (3, 4): {3: beta}, (2, 5): {2: 1}, (3, 5): {3: gamma}},
                {"beta": beta, "gamma": gamma})


def g5_38() -> LieAlgebra:
    return _alg("g5_38", 5, {(1, 4): {1: 1}, (2, 5): {2: 1}, (4, 5): {3: 1}})


def mult6(a=1) -> LieAlgebra:
    """Rotation-dilation type: [e1,e3] = a e1 - e2, [e2,e3] = e1 + a e2."""
    a = Fraction(a)
    return _alg("mult6", 5, {(1, 3): {1: a, 2: -1}, (2, 3): {1: 1, 2: a}}, {"a": a})


def mult7(a=1, b=2) -> LieAlgebra:
    a, b = Fraction(a), Fraction(b)
    return _alg("mult7", 5, {(1, 3): {1: a}, (2, 3): {2: b}}, {"a": a, "b": b})


def mult8(a=1) -> LieAlgebra:
    a = Fraction(a)
    return _alg("mult8", 5, {(1, 3): {1: a}, (2, 3): {2: a}}, {"a": a})


def _build_catalog() -> dict[str, LieAlgebra]:
    R = LieAlgebra.abelian
    F3, F4 = filiform(3), filiform(4)
    cat = [
        l2(),
        F3, F4, filiform(5), filiform(6),
        # the filiform algebra g_{4,1} is F_4
        F4.renamed("g4_1"),
        g4_3(),
        _stub("g4_8", 4, {"h": -1}),
        _stub("g4_9", 4, {"p": 0}),
        g4_10(),
        g5_33(1, 0),
        g5_38(),
        _alg("g_1", 5, {(2, 3): {1: 1}, (2, 5): {3: 1}, (4, 5): {4: 1}}),
        _alg("g_2", 5, {(2, 4): {1: 1}, (1, 5): {1: 1}, (2, 5): {2: 1}, (4, 5): {3: 1}}),
        _alg("g_3", 5, {(1, 4): {1: 1}, (2, 5): {2: 1}, (4, 5): {3: 1}}),
        _alg("g_4", 5, {(1, 4): {1: 1}, (2, 4): {2: 1}, (1, 5): {2: -1}, (2, 5): {1: 1}, (4, 5): {3: 1}}),
        direct_sum(F3, l2(), "mult1"),
        direct_sum(direct_sum(l2(), l2()), R(1), "mult2"),
        _alg("mult3", 5, {(2, 3): {1: 1}, (1, 4): {1: 1}, (2, 4): {2: 1}}),
        direct_sum(g4_10(), R(1), "mult4"),
        _alg("mult5", 5, {(1, 3): {1: 1, 2: 1}, (2, 3): {2: 1}}),
        mult6(1),
        mult7(1, 2),
        mult8(1),
        # the Euclidean motion algebra times R^2 (mult6 at a = 0)
        mult6(0).renamed("euclid", params={"a": Fraction(0)}),
        # R^2 x L_2 in the basis with [e4, e3] = e4
        _alg("r2_l2", 4, {(3, 4): {4: -1}}),
        direct_sum(R(1), F3, "r_f3"),
        direct_sum(g4_3(), R(1), "g4_3_r"),
        direct_sum(F4, R(1), "f4_r"),
        direct_sum(l2(), l2(), "l2_l2"),
        R(3), R(5),
    ]
    # algebras that are named in the classification lists but whose
    # brackets are not written down
    for k in (7, 8, 9, 10, 11, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26,
              27, 28, 29, 30, 31, 37, 39):
        cat.append(_stub(f"g5_{k}", 5))
    return {a.name: a for a in cat}


CATALOG: dict[str, LieAlgebra] = _build_catalog()

def load_catalog_file() -> dict[str, LieAlgebra]:
    """Read the shipped plain-text catalog (data/catalog.txt)."""
    from importlib.resources import files

    text = files("multloop").joinpath("data", "catalog.txt").read_text(encoding="utf-8")
    return {a.name: a for a in loads(text)}


PARAMETRIC = {"g5_33": g5_33, "mult6": mult6, "mult7": mult7, "mult8": mult8}


def get(name: str, **params) -> LieAlgebra:
    """Catalog lookup; parametric families are instantiated at rational values."""
    if params:
        if name not in PARAMETRIC:
            raise KeyError(f"{name} takes no parameters")
        return PARAMETRIC[name](**params)
    return CATALOG[name]

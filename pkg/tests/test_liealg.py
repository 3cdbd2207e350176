from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multloop import liealg as L
from multloop.liealg import Subspace, e

span = Subspace.span


def test_bracket_values():
    g = L.get("g4_3")
    assert L.bracket(g, e(1, 4), e(4, 4)) == e(1, 4)
    assert L.bracket(g, e(4, 4), e(3, 4)) == tuple(-x for x in e(2, 4))
    assert L.bracket(g, e(2, 4), e(2, 4)) == (0, 0, 0, 0)


@pytest.mark.parametrize("name", sorted(L.CATALOG))
def test_catalog_is_lie(name):
    alg = L.CATALOG[name]
    assert L.antisymmetry_defect(alg) == 0
    assert L.jacobi_check(alg)


def test_corrupted_jacobi_fails():
    rel = {**L.get("g4_3").relations(), (1, 3): {4: 1}}
    bad = L.LieAlgebra.from_brackets("bad", 4, rel)
    assert not L.jacobi_check(bad)


def test_commutator_ideal():
    assert L.commutator_ideal(L.get("mult1")) == span([e(3, 5), e(4, 5)], 5)
    assert L.commutator_ideal(L.get("R5")) == Subspace.zero(5)
    assert L.commutator_ideal(L.get("g5_38")) == span([e(1, 5), e(2, 5), e(3, 5)], 5)


def test_center():
    assert L.center(L.get("g_1")) == span([e(1, 5)], 5)
    assert L.center(L.get("R5")) == Subspace.whole(5)
    assert L.center(L.get("mult2")) == span([e(5, 5)], 5)


def test_series():
    f4 = L.get("F4")
    assert L.series(f4, "lower_central").dims == [4, 2, 1, 0]
    assert L.nilpotency_class(f4) == 3
    l2 = L.get("l2")
    assert L.series(l2, "derived").dims == [2, 1, 0]
    assert L.is_solvable(l2) and not L.is_nilpotent(l2)
    assert L.nilpotency_class(l2) is None
    assert L.series(L.get("R3"), "derived").dims == [3, 0]


def test_ideal_and_normalizer():
    g = L.get("g4_3")
    assert L.is_ideal(g, span([e(1, 4)], 4))
    assert L.is_ideal(g, L.whole(g))
    s = span([(1, 1, 0, 0)], 4)
    assert not L.is_ideal(g, s)
    assert L.normalizer(g, s) == span([e(1, 4), e(2, 4), e(3, 4)], 4)
    m1 = L.get("mult1")
    inn = span([e(2, 5), (0, 0, 1, 1, 0)], 5)
    assert L.normalizer(m1, inn) == span([e(2, 5), e(3, 5), e(4, 5)], 5)


def test_quotient():
    q = L.quotient(L.get("g5_33"), span([e(1, 5)], 5))
    assert L.fingerprint(q) == L.fingerprint(L.get("l2_l2"))
    f4 = L.get("F4")
    assert L.fingerprint(L.quotient(f4, Subspace.zero(4))) == L.fingerprint(f4)
    assert L.fingerprint(L.quotient(f4, span([e(4, 4)], 4))) == L.fingerprint(L.get("F3"))


def test_quotient_complement_independent():
    alg = L.get("mult3")
    ideal = L.commutator_ideal(alg)
    one = L.quotient(alg, ideal)
    other = L.quotient(alg, ideal, complement=[(1, 1, 0, 1, 0), (0, 0, 1, 1, 0), (2, 0, 0, 0, 1)])
    assert L.fingerprint(one) == L.fingerprint(other)


def test_quotient_rejects_non_ideal():
    with pytest.raises(L.NotIdeal):
        L.quotient(L.get("g4_3"), span([(1, 1, 0, 0)], 4))


def test_fingerprints():
    assert L.fingerprint(L.get("F4")) == (4, (4, 2, 0), (4, 2, 1, 0), 1, 2, True)
    assert L.fingerprint(L.get("R3")) == (3, (3, 0), (3, 0), 3, 0, True)
    fp = L.fingerprint(L.get("l2_l2"))
    assert fp.derived == (4, 2, 0) and fp.lower_central[:2] == (4, 2) and fp.center_dim == 0


def test_direct_sums_match_catalog():
    assert L.direct_sum(L.get("F3"), L.get("l2")) == L.get("mult1")
    assert L.direct_sum(L.direct_sum(L.get("l2"), L.get("l2")), L.LieAlgebra.abelian(1)) == L.get("mult2")
    a = L.get("g4_3")
    assert L.direct_sum(a, L.LieAlgebra.abelian(0)) == a


def test_dimension_limits():
    with pytest.raises(ValueError):
        L.LieAlgebra.from_brackets("big", 7, {})


def test_stubs_are_flagged():
    g = L.get("g5_7")
    assert g.is_stub and g.relations() == {}
    assert not L.get("mult1").is_stub


def test_parametric():
    m7 = L.get("mult7", a=Fraction(2), b=Fraction(3))
    assert m7.params == {"a": 2, "b": 3}
    assert L.jacobi_check(m7)
    with pytest.raises(KeyError):
        L.get("mult1", a=1)


def test_text_round_trip():
    text = L.dumps(L.CATALOG.values())
    back = L.loads(text)
    assert [a.name for a in back] == list(L.CATALOG)
    for a in back:
        ref = L.CATALOG[a.name]
        assert a == ref and a.params == ref.params and a.flags == ref.flags
    assert L.dumps(back) == text


def test_shipped_file_matches_catalog():
    assert L.load_catalog_file() == L.CATALOG


def test_record_format():
    assert L.format_algebra(L.get("mult1")) == "mult1; 5; [1,2,3]=1; [4,5,4]=1; params:"
    with pytest.raises(ValueError):
        L.parse_algebra("x; 2; [2,1,1]=1")


# --- properties on the exact catalog ------------------------------------------------

real = [n for n in sorted(L.CATALOG) if not L.CATALOG[n].is_stub and L.CATALOG[n].dim > 0]


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(real), st.data())
def test_center_inside_normalizers(name, data):
    alg = L.CATALOG[name]
    n = alg.dim
    vec = st.lists(st.integers(-2, 2), min_size=n, max_size=n)
    s = span([data.draw(vec)], n)  # 1-dim subspaces are subalgebras
    assert L.is_subalgebra(alg, s)
    assert L.center(alg).issubset(L.normalizer(alg, s))
    assert s.issubset(L.normalizer(alg, s))


@pytest.mark.parametrize("name", real)
def test_series_properties(name):
    alg = L.CATALOG[name]
    assert L.is_ideal(alg, L.commutator_ideal(alg))
    dims = L.series(alg, "derived").dims
    assert all(a >= b for a, b in zip(dims, dims[1:]))


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(real), st.sampled_from(real))
def test_direct_sum_fingerprint_adds(a, b):
    A, B = L.CATALOG[a], L.CATALOG[b]
    if A.dim + B.dim > L.MAX_DIM:
        return
    S = L.direct_sum(A, B)
    fa, fb, fs = L.fingerprint(A), L.fingerprint(B), L.fingerprint(S)
    assert fs.center_dim == fa.center_dim + fb.center_dim
    da, db = list(fa.derived), list(fb.derived)
    k = max(len(da), len(db))
    da += [da[-1]] * (k - len(da))
    db += [db[-1]] * (k - len(db))
    assert list(fs.derived) == [x + y for x, y in zip(da, db)]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=4, max_size=4), max_size=5))
def test_span_is_canonical(rows):
    s = span(rows, 4)
    assert span(list(reversed(rows)), 4) == s
    assert span(list(s.basis), 4) == s
    assert all(s.contains(r) for r in rows)

import math
import random
from collections import Counter
from functools import lru_cache
from itertools import product

import pytest
from sympy import Matrix

from mext.abelian import (
    FinAbGroup,
    GroupElt,
    GroupHom,
    SizeGuardError,
    Span,
    Z,
    abelian_groups_of_order,
    canonical_decomposition,
    complement_search,
    ext_group,
    hom_group,
    is_split,
    kernel_cokernel,
    smith_normal_form,
    snf,
    tensor,
    two_torsion,
    wedge_power,
)


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def census(G: FinAbGroup) -> Counter:
    return Counter(G.order_of(x) for x in G.elements())


def all_groups(max_order):
    return [G for n in range(1, max_order + 1) for G in abelian_groups_of_order(n)]


# --- Smith normal form -------------------------------------------------------


def check_snf(M):
    U, D, V = smith_normal_form(M)
    assert matmul(matmul(U, M), V) == D
    diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D[0])) if i != j)
    assert all(d >= 0 for d in diag)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else (b % a == 0)
    assert abs(Matrix(U).det()) == 1
    assert abs(Matrix(V).det()) == 1
    return diag


def test_snf_already_diagonal():
    U, D, V = smith_normal_form([[2, 0], [0, 4]])
    assert D == [[2, 0], [0, 4]]
    assert U == [[1, 0], [0, 1]] and V == [[1, 0], [0, 1]]


def test_snf_coprime_diagonal():
    assert check_snf([[2, 0], [0, 3]]) == [1, 6]


def test_snf_random_matrices():
    rng = random.Random(20240611)
    for _ in range(200):
        r, c = rng.randint(1, 4), rng.randint(1, 4)
        M = [[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)]
        check_snf(M)


def test_snf_tracks_inverses():
    rng = random.Random(7)
    for _ in range(50):
        M = [[rng.randint(-5, 5) for _ in range(3)] for _ in range(3)]
        s = snf(M)
        I = [[int(i == j) for j in range(3)] for i in range(3)]
        assert matmul(s.U, s.Uinv) == I
        assert matmul(s.V, s.Vinv) == I


def test_snf_empty():
    s = snf([], 0, 0)
    assert s.D == [] and s.rank == 0


# --- canonical form and functors -----------------------------------------------


def test_canonical_examples():
    assert canonical_decomposition(Z(2, 4, 3)).moduli == (2, 12)
    assert canonical_decomposition(Z(6)).moduli == (6,)
    assert canonical_decomposition(Z()).moduli == ()


def test_canonical_preserves_census():
    rng = random.Random(3)
    groups = []
    while len(groups) < 60:
        mods = tuple(rng.randint(1, 8) for _ in range(rng.randint(1, 3)))
        if math.prod(mods) <= 64:
            groups.append(Z(*mods))
    for G in groups + all_groups(64):
        C = canonical_decomposition(G)
        assert C.order == G.order
        assert all(b % a == 0 for a, b in zip(C.moduli, C.moduli[1:]))
        assert census(C) == census(G)


def test_hom_examples():
    # direct: f(1) in Z6 must satisfy 4 f(1) = 0
    valid = [y for y in range(6) if 4 * y % 6 == 0]
    assert len(valid) == 2 == hom_group(Z(4), Z(6)).order
    assert hom_group(Z(4), Z(6)).moduli == (2,)
    assert hom_group(Z(2, 4), Z()).order == 1


def test_ext_examples():
    # Ext(Z_n, B) = B / nB, counted directly
    B = Z(4)
    assert len({B.scale(2, x) for x in B.elements()}) == 2
    assert ext_group(Z(2), Z(4)).moduli == (2,)
    assert tensor(Z(2, 4), Z(4)).moduli == (2, 4)


@lru_cache(maxsize=None)
def _column_count(B: FinAbGroup, n: int) -> int:
    # images of a generator of order n that pass the well-definedness check
    count = 0
    for y in B.elements():
        try:
            GroupHom.from_images(Z(n), B, [y])
            count += 1
        except ValueError:
            pass
    return count


def test_hom_group_brute_force():
    groups = all_groups(64)
    for A in groups:
        for B in groups:
            # the check is columnwise, so valid matrices factor over generators
            brute = math.prod(_column_count(B, n) for n in A.moduli)
            assert hom_group(A, B).order == brute, (A, B)


def test_wedge_examples():
    assert wedge_power(Z(2, 2), 3).order == 1
    assert wedge_power(Z(2, 2, 2), 3).moduli == (2,)
    assert wedge_power(Z(8), 2).order == 1
    assert wedge_power(Z(2, 4), 2).moduli == (2,)


def test_wedge3_by_counting_alternating_forms():
    # an alternating trilinear form on Z2^3 vanishes on triples with a repeat
    # index; choose values on the 6 distinct triples and keep antisymmetric ones
    from itertools import permutations

    triples = list(permutations(range(3)))
    count = 0
    for vals in product((0, 1), repeat=len(triples)):
        v = dict(zip(triples, vals))
        if all(v[(a, b, c)] == v[(b, a, c)] == v[(a, c, b)] for a, b, c in triples):
            count += 1
    assert count == wedge_power(Z(2, 2, 2), 3).order


# --- kernels and cokernels -----------------------------------------------------


def test_kernel_cokernel_examples():
    k, c = kernel_cokernel(GroupHom(Z(2), Z(4), ((0,),)))
    assert k.group.moduli == (2,) and c.group.moduli == (4,)
    k, c = kernel_cokernel(GroupHom.from_images(Z(8), Z(8), [(2,)]))
    assert k.group.moduli == (2,) and c.group.moduli == (2,)
    k, c = kernel_cokernel(GroupHom.from_images(Z(2), Z(2, 2), [(1, 0)]))
    assert k.group.order == 1 and c.group.moduli == (2,)


def random_hom(rng, S, T):
    images = []
    for n in S.moduli:
        choices = [y for y in T.elements() if all(n * a % m == 0 for a, m in zip(y, T.moduli))]
        images.append(rng.choice(choices))
    return GroupHom.from_images(S, T, images)


def test_kernel_cokernel_against_enumeration():
    rng = random.Random(11)
    groups = [G for G in all_groups(16) if G.order > 1] + [Z(2, 6), Z(4, 2), Z(3, 6)]
    for _ in range(150):
        S, T = rng.choice(groups), rng.choice(groups)
        f = random_hom(rng, S, T)
        k, c = kernel_cokernel(f)
        zeros = [x for x in S.elements() if f(x) == T.zero]
        assert k.group.order == len(zeros)
        assert set(k.span.elements()) == set(zeros)
        image = {f(x) for x in S.elements()}
        assert c.group.order * len(image) == T.order
        assert all(c.projection(y) == c.group.zero for y in image)
        assert {c.projection(y) for y in T.elements()} == set(c.group.elements())
        assert all(c.projection(l) == e for l, e in zip(c.lifts, c.group.basis()))


def test_span_solve_and_coords():
    G = Z(4, 6)
    S = Span(G, [(2, 3), (0, 2)])
    assert S.order == len(S.elements()) == 6
    for x in G.elements():
        c = S.solve(x)
        assert (c is not None) == (x in S.elements())
        if c is not None:
            assert G.combine(c, S.gens) == x
            assert G.combine(S.coords(x), S.basis) == x


def test_elements_and_json():
    G = Z(2, 4)
    x = G(1, 3)
    assert isinstance(x, GroupElt)
    assert (x + x).coords == (0, 2)
    assert (-x).coords == (1, 1)
    assert (3 * x).coords == (1, 1)
    assert x.order == 4
    assert FinAbGroup.from_json(G.to_json()) == G
    f = GroupHom.from_images(G, Z(4), [(2,), (1,)])
    assert GroupHom.from_json(f.to_json()) == f


def test_ill_defined_hom_rejected():
    with pytest.raises(ValueError):
        GroupHom.from_images(Z(2), Z(4), [(1,)])


def test_exponent_cap():
    with pytest.raises(ValueError):
        Z(2**17)


# --- split test -----------------------------------------------------------------


def test_is_split_examples():
    assert is_split(Z(2), (1,))
    assert not is_split(Z(4), (2,))
    assert is_split(Z(2, 4), (1, 2))
    with pytest.raises(ValueError):
        is_split(Z(4), (1,))


def test_complement_examples():
    assert complement_search(Z(2, 4), (1, 2)) == [(0, 1)]
    assert complement_search(Z(4), (2,)) is None
    assert complement_search(Z(2), (1,)) == []


def test_is_split_agrees_with_complement_search():
    presentations = all_groups(32) + [Z(2, 6), Z(6, 4), Z(4, 2, 2), Z(2, 12), Z(8, 2, 2)]
    checked = 0
    for A in presentations:
        for t in two_torsion(A).elements():
            if A.order_of(t) != 2:
                continue
            comp = complement_search(A, t)
            assert is_split(A, t) == (comp is not None), (A, t)
            if comp is not None:
                B = Span(A, comp)
                assert t not in B and B.order * 2 == A.order
            checked += 1
    assert checked > 100


def test_complement_search_guard(monkeypatch):
    monkeypatch.setenv("MEXT_MAX_ORDER", "8")
    with pytest.raises(SizeGuardError):
        complement_search(Z(2, 8), (1, 0))

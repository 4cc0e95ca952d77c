import random
from fractions import Fraction

import pytest

from mext.abelian import GroupHom, Span, Z, kernel_cokernel
from mext.extensions import (
    BaseCategory,
    InvariantError,
    MinExt,
    OrderCapExceeded,
    build_M1_i,
    build_M2_xi,
    build_M_k_zeta,
    build_trivial,
    charge_and_w,
    charge_label,
    cyclic_fermionic,
    degree_hom,
    enumerate_pointed,
    equivalent,
    grading_degree,
    identify,
    order_in_mext,
    power,
    product,
    reverse,
    svect,
    unit,
    validate,
    z2_z2f,
)
from mext.filtration import mext_factors
from mext.qforms import MetricGroup, QuadForm, central_charge, enumerate_forms


@pytest.fixture(scope="module")
def sv_reps():
    return enumerate_pointed(svect())


@pytest.fixture(scope="module")
def zz_reps():
    return enumerate_pointed(z2_z2f())


def constructed_extensions():
    out = [unit(svect()), build_trivial(svect(), QuadForm(Z(2), (Fraction(1, 4),)))]
    for n in (1, 2, 3):
        for k in range(n + 1):
            for z in (1, 3):
                out.append(build_M_k_zeta(n, k, z))
    out += [build_M2_xi(x) for x in (1, 3, 5, 7)]
    out += [build_M1_i(s) for s in (1, 3)]
    for t in ((0,), (1,)):
        for q in enumerate_forms(Z(2)):
            out.append(build_trivial(BaseCategory(Z(2), t), q))
    for q in enumerate_forms(Z(2, 2))[::5]:
        out.append(build_trivial(z2_z2f(), q))
    return out


# --- examples -----------------------------------------------------------------


def test_trivial_over_svect_with_quarter():
    M = build_trivial(svect(), QuadForm(Z(2), (Fraction(1, 4),)))
    assert sorted(M.cat.form.values()) == [0, Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)]
    assert charge_and_w(M)[0] == 4


def test_unit_is_toric_code_like():
    M = unit(svect())
    assert M.C.order == 4 and charge_and_w(M)[0] == 0
    assert M.cat.q(M.iota((1,))) == Fraction(1, 2)


def test_svect_classes(sv_reps):
    assert len(sv_reps) == 8
    charges = [charge_and_w(M)[0] for M in sv_reps]
    assert sorted(charges) == list(range(0, 16, 2))


def test_svect_charge_determines_class(sv_reps):
    # any extension is identified by its charge alone
    rng = random.Random(6)
    for _ in range(20):
        a, b = rng.choice(sv_reps), rng.choice(sv_reps)
        P = product(a, b)
        idx = identify(P, sv_reps)
        assert charge_and_w(sv_reps[idx])[0] == charge_and_w(P)[0]


def test_mkzeta_orders():
    assert order_in_mext(build_M_k_zeta(2, 0, 1)) == 8
    assert order_in_mext(build_M_k_zeta(3, 0, 1)) == 16
    assert order_in_mext(build_M_k_zeta(2, 2, 1)) in (1, 2)


def test_mkzeta_square_law():
    for n in (1, 2):
        for k in range(n):
            for z in (1, 3, 5, 7):
                assert equivalent(power(build_M_k_zeta(n, k, z), 2), build_M_k_zeta(n, k + 1, z)) is not None


def test_mkzeta_top_is_trivial():
    # with k = n the extension is of the form A + A^ with some form on A
    for z in (1, 3):
        M = build_M_k_zeta(2, 2, z)
        base = cyclic_fermionic(2)
        assert any(equivalent(M, build_trivial(base, q)) is not None for q in enumerate_forms(base.A))
        assert order_in_mext(M) == 2


def test_mkzeta_rejects_bad_input():
    with pytest.raises(ValueError):
        build_M_k_zeta(2, 0, 2)
    with pytest.raises(ValueError):
        build_M_k_zeta(2, 3, 1)


def test_m2_and_m1():
    M2 = build_M2_xi(1)
    assert order_in_mext(M2) == 4
    assert equivalent(build_M1_i(1), power(M2, 2)) is not None
    same = [equivalent(M2, build_M2_xi(x)) is not None for x in (1, 3, 5, 7)]
    assert same == [True, False, True, False]
    assert equivalent(build_M1_i(1), build_M1_i(3)) is not None


def test_z2z2_enumeration(zz_reps):
    assert len(zz_reps) == 32


# --- group laws -------------------------------------------------------------------


def test_unit_and_inverse_laws(sv_reps):
    e = unit(svect())
    for M in sv_reps:
        assert equivalent(product(M, e), M) is not None
        assert equivalent(product(e, M), M) is not None
        assert equivalent(product(M, reverse(M)), e) is not None


def test_commutativity(sv_reps):
    for a in sv_reps:
        for b in sv_reps:
            assert equivalent(product(a, b), product(b, a)) is not None


def test_associativity(sv_reps):
    for a in sv_reps:
        for b in sv_reps:
            ab = product(a, b)
            for c in sv_reps:
                assert identify(product(ab, c), sv_reps) == identify(product(a, product(b, c)), sv_reps)


def test_closure_and_invariants(zz_reps):
    rng = random.Random(31)
    for _ in range(20):
        a, b = rng.choice(zz_reps), rng.choice(zz_reps)
        P = product(a, b)
        validate(P)
        assert P.C.order == 16
        identify(P, zz_reps)


def test_charge_is_a_homomorphism(sv_reps, zz_reps):
    rng = random.Random(41)
    pools = [sv_reps, zz_reps, [build_M_k_zeta(2, k, z) for k in range(3) for z in (1, 3, 5, 7)]]
    for _ in range(20):
        pool = rng.choice(pools)
        a, b = rng.choice(pool), rng.choice(pool)
        ka, kb = charge_and_w(a)[0], charge_and_w(b)[0]
        assert charge_and_w(product(a, b))[0] == (ka + kb) % 16


# --- invariants -------------------------------------------------------------------


def test_grading_faithful_on_constructed():
    for M in constructed_extensions():
        d = degree_hom(M)
        ker, coker = kernel_cokernel(d)
        assert coker.group.order == 1, "grading is not onto"
        assert set(ker.span.elements()) == set(Span(M.C, M.lagrangian).elements())
        for c in M.C.elements():
            assert all(M.cat.b(c, y) == M.base.A.pairing(grading_degree(M, c), e)
                       for y, e in zip(M.lagrangian, M.base.A.basis()))


def test_invariants_reported():
    M = unit(svect())
    with pytest.raises(InvariantError, match="injectivity"):
        MinExt(M.base, M.cat, GroupHom(Z(2), M.C, ((0,), (0,))))
    with pytest.raises(InvariantError, match="restriction"):
        MinExt(M.base, M.cat, GroupHom.from_images(Z(2), M.C, [(1, 0)]))
    big = MetricGroup.of(QuadForm(Z(2, 2, 2), (Fraction(1, 4),) * 3))
    with pytest.raises(InvariantError, match="order"):
        MinExt(M.base, big, GroupHom.from_images(Z(2), big.group, [(1, 1, 0)]))


def test_base_rejects_large_t():
    with pytest.raises(ValueError):
        BaseCategory(Z(4), (1,))


def test_order_cap():
    with pytest.raises(OrderCapExceeded):
        order_in_mext(build_M2_xi(1), cap=2)


def test_json_roundtrip():
    for M in constructed_extensions():
        assert MinExt.from_json(M.to_json()) == M


def test_charge_label():
    assert charge_label(18) == "2/16"


# --- enumeration against the filtration -----------------------------------------------


@pytest.mark.parametrize(
    "base",
    [svect(), cyclic_fermionic(2), z2_z2f(), BaseCategory(Z(2), (0,)), BaseCategory(Z(4), (0,)),
     BaseCategory(Z(2, 2), (0, 0)), BaseCategory(Z(3), (0,))],
    ids=str,
)
def test_pointed_count_matches_filtration(base):
    reps = enumerate_pointed(base)
    rep = mext_factors(base)
    assert len(reps) == rep.pointed_order
    # the representatives are pairwise inequivalent
    for i, a in enumerate(reps):
        for b in reps[:i]:
            assert equivalent(a, b) is None


def test_tannakian_charges_are_zero_mod_8():
    # over Rep(A) the centers are Drinfeld centers, hence have vanishing charge
    for M in enumerate_pointed(BaseCategory(Z(2, 2), (0, 0))):
        assert central_charge(M.cat) == 0

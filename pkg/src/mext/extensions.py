"""Pointed minimal non-degenerate extensions of Rep(A, t).

The base category is modelled by the pre-metric group ``(A^, q_t)`` with
``q_t(phi) = <t, phi>``. A pointed minimal extension is a metric group ``C``
of order ``|A|^2`` together with an embedding ``iota`` of ``A^`` whose image
is its own orthogonal complement and on which ``q_C`` restricts to ``q_t``.

Products are computed by condensing the antidiagonal copy of ``A^`` in
``C1 + C2``; the unit is the trivial extension built from the zero form.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

from .abelian import (
    FinAbGroup,
    GroupHom,
    Span,
    abelian_groups_of_order,
    check_size,
    kernel_cokernel,
)
from .qforms import (
    MetricGroup,
    QuadForm,
    central_charge,
    condense,
    direct_sum,
    enumerate_forms,
    evaluate,
    isometry_classes,
    isometry_search,
    orthogonal_complement,
)


class InvariantError(ValueError):
    """A minimal-extension invariant fails; the message names it."""


@dataclass(frozen=True)
class BaseCategory:
    A: FinAbGroup
    t: tuple[int, ...]

    def __post_init__(self):
        t = self.A.elt(self.t)
        if any(2 * a % n for a, n in zip(t, self.A.moduli)):
            raise ValueError(f"t = {t} does not satisfy 2t = 0")
        object.__setattr__(self, "t", t)

    @property
    def super_tannakian(self) -> bool:
        return any(self.t)

    def q_t(self, phi) -> Fraction:
        return self.A.pairing(self.t, phi)

    def dual_basis(self) -> list[tuple[int, ...]]:
        return self.A.basis()

    def to_json(self) -> dict:
        return {"A": self.A.to_json(), "t": {"coords": list(self.t)}}

    @classmethod
    def from_json(cls, obj) -> "BaseCategory":
        t = obj["t"]
        return cls(FinAbGroup.from_json(obj["A"]), tuple(t["coords"] if isinstance(t, dict) else t))

    def __str__(self) -> str:
        return f"Rep({self.A}, t=({','.join(map(str, self.t))}))"


def svect() -> BaseCategory:
    return BaseCategory(FinAbGroup((2,)), (1,))


def cyclic_fermionic(n: int) -> BaseCategory:
    """Rep(Z_{2^n}^f): A = Z_{2^n} with t = 2^(n-1)."""
    return BaseCategory(FinAbGroup((2**n,)), (2 ** (n - 1),))


def z2_z2f() -> BaseCategory:
    return BaseCategory(FinAbGroup((2, 2)), (0, 1))


@dataclass(frozen=True)
class MinExt:
    base: BaseCategory
    cat: MetricGroup
    iota: GroupHom

    def __post_init__(self):
        validate(self)

    @property
    def C(self) -> FinAbGroup:
        return self.cat.group

    @cached_property
    def lagrangian(self) -> list[tuple[int, ...]]:
        return [self.iota(e) for e in self.base.dual_basis()]

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "cat": self.cat.to_json(), "iota": {"matrix": [list(r) for r in self.iota.matrix]}}

    @classmethod
    def from_json(cls, obj) -> "MinExt":
        base = BaseCategory.from_json(obj["base"])
        cat = MetricGroup.from_json(obj["cat"])
        return cls(base, cat, GroupHom.from_json(obj["iota"], base.A, cat.group))

    def key(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def validate(M: MinExt) -> None:
    A, C, q = M.base.A, M.cat.group, M.cat.form
    if M.iota.source.moduli != A.moduli or M.iota.target.moduli != C.moduli:
        raise InvariantError("iota: source must be the dual of A and target the extension group")
    if C.order != A.order**2:
        raise InvariantError(f"order: |C| = {C.order} but |A|^2 = {A.order ** 2}")
    if not M.iota.is_injective():
        raise InvariantError("injectivity: iota is not injective")
    imgs = [M.iota(e) for e in A.basis()]
    for k, (y, e) in enumerate(zip(imgs, A.basis())):
        if evaluate(q, y) != M.base.q_t(e):
            raise InvariantError(f"restriction: q(iota(e_{k}*)) = {evaluate(q, y)} differs from <t, e_{k}*>")
        for l in range(k):
            if q.b(y, imgs[l]):
                raise InvariantError(f"restriction: b(iota(e_{l}*), iota(e_{k}*)) is nonzero")
    if Span(C, orthogonal_complement(M.cat, imgs)).order != A.order:
        raise InvariantError("minimality: iota(A^) is not its own orthogonal complement")


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def build_trivial(base: BaseCategory, q: QuadForm | None = None) -> MinExt:
    """C = A + A^ with h(a, phi) = <a, phi> + <t, phi> + q(a) and iota(phi) = (0, phi)."""
    A = base.A
    q = QuadForm.zero(A) if q is None else q
    if q.group.moduli != A.moduli:
        raise ValueError("q must be a form on A")
    r = A.rank
    C = FinAbGroup(A.moduli + A.moduli)
    diag = list(q.diag) + [Fraction(tk, n) for tk, n in zip(base.t, A.moduli)]
    B = [[Fraction(0)] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        for j in range(r):
            B[i][j] = q.c(i, j)
        B[i][r + i] = B[r + i][i] = Fraction(1, A.moduli[i])
    cat = MetricGroup.of(QuadForm.from_bilinear_data(C, diag, B))
    iota = GroupHom.from_images(A, C, [(0,) * r + e for e in A.basis()])
    return MinExt(base, cat, iota)


def unit(base: BaseCategory) -> MinExt:
    return build_trivial(base)


def reverse(M: MinExt) -> MinExt:
    return MinExt(M.base, M.cat.reverse(), M.iota)


def product(M1: MinExt, M2: MinExt, sign: int = -1) -> MinExt:
    if M1.base != M2.base:
        raise ValueError("extensions of different base categories")
    A = M1.base.A
    big = direct_sum(M1.cat, M2.cat)
    G = big.group
    H = [G.elt(M1.iota(e) + tuple(sign * v for v in M2.iota(e))) for e in A.basis()]
    cond = condense(big, H)
    z2 = (0,) * M2.C.rank
    images = [cond.project(M1.iota(e) + z2) for e in A.basis()]
    iota = GroupHom.from_images(A, cond.quotient.group, images)
    return MinExt(M1.base, cond.quotient, iota)


def power(M: MinExt, n: int) -> MinExt:
    if n < 0:
        return power(reverse(M), -n)
    out = unit(M.base)
    for _ in range(n):
        out = product(out, M)
    return out


def grading_degree(M: MinExt, c) -> tuple[int, ...]:
    """The x in A with b_C(c, iota(phi)) = <x, phi> for every phi."""
    A = M.base.A
    c = M.C.elt(c)
    return A.elt(int(n * M.cat.b(c, y)) for n, y in zip(A.moduli, M.lagrangian))


def degree_hom(M: MinExt) -> GroupHom:
    return GroupHom.from_images(M.C, M.base.A, [grading_degree(M, e) for e in M.C.basis()])


def equivalent(M1: MinExt, M2: MinExt) -> GroupHom | None:
    if M1.base != M2.base:
        raise ValueError("extensions of different base categories")
    pinned = [(M1.iota(e), M2.iota(e)) for e in M1.base.A.basis()]
    return isometry_search(M1.cat, M2.cat, pinned)


class OrderCapExceeded(RuntimeError):
    pass


def order_in_mext(M: MinExt, cap: int = 64) -> int:
    if cap < 1:
        raise ValueError("cap must be positive")
    e = unit(M.base)
    P = M
    for n in range(1, cap + 1):
        if equivalent(P, e) is not None:
            return n
        P = product(P, M)
    raise OrderCapExceeded(f"order exceeds cap {cap}")


# ---------------------------------------------------------------------------
# Central charge and the map to Mext(sVect)
# ---------------------------------------------------------------------------


def w_image(M: MinExt) -> MinExt:
    """Condense the maximal Tannakian part of the base; the result lives over sVect."""
    base, A = M.base, M.base.A
    if not base.super_tannakian:
        raise ValueError("base is Tannakian")
    chi = GroupHom.from_images(A, FinAbGroup((2,)), [(int(2 * base.q_t(e)),) for e in A.basis()])
    ker, _ = kernel_cokernel(chi)
    cond = condense(M.cat, [M.iota(g) for g in ker.generators])
    fermion = next(e for e in A.basis() if base.q_t(e))
    iota = GroupHom.from_images(FinAbGroup((2,)), cond.quotient.group, [cond.project(M.iota(fermion))])
    return MinExt(svect(), cond.quotient, iota)


def charge_and_w(M: MinExt) -> tuple[int, int]:
    k16 = 2 * central_charge(M.cat) % 16
    if M.base.super_tannakian:
        small = w_image(M)
        if small.C.order != 4:
            raise ArithmeticError("condensed category does not have order 4")
        check = 2 * central_charge(small.cat) % 16
    else:
        check = 0
    if check != k16:
        raise ArithmeticError(f"charge routes disagree: {k16} vs {check}")
    return k16, check


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def build_M_k_zeta(n: int, k: int, zeta_exponent: int) -> MinExt:
    """C(Z_{2^k}, q_{-zeta^{-2^{2(n-k)}}}) + C(Z_{2^{2n-k}}, q_zeta) over Rep(Z_{2^n}^f).

    ``zeta = exp(2 pi i z / 2^{2n-k+1})`` with z odd; iota(j) = (j, 2^{n-k} j).
    """
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need n >= 1 and 0 <= k <= n")
    z = zeta_exponent
    if z % 2 == 0:
        raise ValueError("zeta exponent must be odd")
    base = cyclic_fermionic(n)
    big = 2 ** (2 * n - k)
    q2 = Fraction(z, 2 * big)
    if k == 0:
        C = FinAbGroup((big,))
        q = QuadForm(C, (q2,))
        iota = GroupHom.from_images(base.A, C, [(2**n,)])
    else:
        C = FinAbGroup((2**k, big))
        q = QuadForm(C, (Fraction(1, 2) - Fraction(z, 2 ** (k + 1)), q2), (0,))
        iota = GroupHom.from_images(base.A, C, [(1, 2 ** (n - k))])
    return MinExt(base, MetricGroup.of(q), iota)


def find_embeddings(cat: MetricGroup, base: BaseCategory) -> Iterator[GroupHom]:
    """All embeddings iota of A^ into ``cat`` making a minimal extension, lexicographically."""
    A, C = base.A, cat.group
    if C.order != A.order**2:
        return
    D = math.lcm(cat.form.denominator, 2)
    table = cat.form.table(D).tolist()
    elems = list(C.elements())
    targets = [int(base.q_t(e) * D) for e in A.basis()]
    cand = [
        [y for y, v in zip(elems, table) if v == targets[k] and all(n * a % m == 0 for a, m in zip(y, C.moduli))]
        for k, n in enumerate(A.moduli)
    ]
    chosen: list[tuple[int, ...]] = []

    def rec(k: int):
        if k == A.rank:
            if Span(C, chosen).order == A.order:
                yield GroupHom.from_images(A, C, chosen)
            return
        for y in cand[k]:
            if all(cat.b(y, x) == 0 for x in chosen):
                chosen.append(y)
                yield from rec(k + 1)
                chosen.pop()

    yield from rec(0)


def first_embedding(cat: MetricGroup, base: BaseCategory) -> MinExt:
    for iota in find_embeddings(cat, base):
        return MinExt(base, cat, iota)
    raise InvariantError("no embedding of the base category exists")


def drinfeld_center_pointed(q: QuadForm) -> MetricGroup:
    """Z(C(B, q)) = C(B, q) + C(B, q)^rev."""
    return direct_sum(MetricGroup.of(q), MetricGroup.of(-q))


def build_M2_xi(xi_exponent: int) -> MinExt:
    """Z(C(Z4, q_xi)) over Rep(Z2 x Z2^f), xi = exp(2 pi i x / 8) with x odd."""
    if xi_exponent % 2 == 0:
        raise ValueError("xi must be a primitive 8th root of unity")
    q = QuadForm(FinAbGroup((4,)), (Fraction(xi_exponent, 8),))
    return first_embedding(drinfeld_center_pointed(q), z2_z2f())


def build_M1_i(i_exponent: int = 1) -> MinExt:
    """Z(C(Z2, q_i) x C(Z2, q_i)) over Rep(Z2 x Z2^f), i = exp(2 pi i s / 4) with s odd."""
    if i_exponent % 2 == 0:
        raise ValueError("i must be a primitive 4th root of unity")
    v = Fraction(i_exponent, 4)
    q = QuadForm(FinAbGroup((2, 2)), (v, v), (0,))
    return first_embedding(drinfeld_center_pointed(q), z2_z2f())


# ---------------------------------------------------------------------------
# Exhaustive enumeration
# ---------------------------------------------------------------------------


def class_key(M: MinExt) -> tuple:
    """Equivalence invariant: doubled charge and the census of (degree, value)."""
    k16 = 2 * central_charge(M.cat) % 16
    census = sorted((grading_degree(M, c), M.cat.q(c)) for c in M.C.elements())
    return (k16, tuple(census))


def metric_groups_of_order(n: int) -> list[MetricGroup]:
    return list(_metric_groups_of_order(n))


@lru_cache(maxsize=None)
def _metric_groups_of_order(n: int) -> tuple[MetricGroup, ...]:
    out = []
    for G in abelian_groups_of_order(n):
        out.extend(isometry_classes(enumerate_forms(G, nondegenerate_only=True)))
    return tuple(out)


def enumerate_pointed(base: BaseCategory) -> list[MinExt]:
    """Representatives of all equivalence classes of pointed minimal extensions.

    Each class is represented by the candidate with the lexicographically
    smallest JSON encoding among those generated. Results are memoized per
    base category.
    """
    check_size(base.A.order, 4, "enumerate_pointed base group")
    return list(_enumerate_pointed(base))


@lru_cache(maxsize=None)
def _enumerate_pointed(base: BaseCategory) -> tuple[MinExt, ...]:
    classes: list[list[MinExt]] = []
    buckets: dict[tuple, list[int]] = {}
    for cat in metric_groups_of_order(base.A.order**2):
        for iota in find_embeddings(cat, base):
            M = MinExt(base, cat, iota)
            key = class_key(M)
            bucket = buckets.setdefault(key, [])
            for idx in bucket:
                if equivalent(classes[idx][0], M) is not None:
                    classes[idx].append(M)
                    break
            else:
                bucket.append(len(classes))
                classes.append([M])
    reps = [min(members, key=MinExt.key) for members in classes]
    return tuple(sorted(reps, key=lambda M: (charge_and_w(M)[0], M.key())))


def identify(M: MinExt, reps: Sequence[MinExt]) -> int:
    """Index of the representative equivalent to ``M``."""
    key = class_key(M)
    for i, R in enumerate(reps):
        if class_key(R) == key and equivalent(R, M) is not None:
            return i
    raise LookupError("extension not found among the representatives")


def multiplication_table(reps: Sequence[MinExt]) -> list[list[int]]:
    return [[identify(product(a, b), reps) for b in reps] for a in reps]


def order_census(reps: Sequence[MinExt], cap: int = 64) -> dict[int, int]:
    out: dict[int, int] = {}
    for M in reps:
        k = order_in_mext(M, cap)
        out[k] = out.get(k, 0) + 1
    return dict(sorted(out.items()))


def charge_label(k16: int) -> str:
    return f"{k16 % 16}/16"

"""Quadratic and bilinear forms on finite abelian groups with values in Q/Z.

Values are exact: a Q/Z element is a :class:`fractions.Fraction` reduced into
``[0, 1)``. A quadratic form is stored by its values on generators,

    q(x) = sum_i x_i^2 q(e_i) + sum_{i<j} x_i x_j b(e_i, e_j),

which covers every quadratic form on a product of cyclic groups. Floating
point appears only in :func:`gauss_sum`, and there it is paired with an exact
formula for ``|sigma|^2``.
"""
from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .abelian import (
    FinAbGroup,
    GroupHom,
    Span,
    _coords,
    check_size,
    cokernel_order,
    direct_sum as group_sum,
    kernel_cokernel,
)


def qz(v) -> Fraction:
    """Reduce a rational into [0, 1)."""
    return Fraction(v) % 1


def qz_str(v: Fraction) -> str:
    v = qz(v)
    return f"{v.numerator}/{v.denominator}"


def parse_qz(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return qz(s)
    return qz(Fraction(str(s).strip()))


def _pairs(r: int) -> list[tuple[int, int]]:
    return list(combinations(range(r), 2))


def _diag_modulus(n: int) -> int:
    return 2 * n if n % 2 == 0 else n


# ---------------------------------------------------------------------------
# Forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BilForm:
    group: FinAbGroup
    matrix: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        G = self.group
        M = tuple(tuple(qz(v) for v in row) for row in self.matrix)
        if len(M) != G.rank or any(len(r) != G.rank for r in M):
            raise ValueError("bilinear form matrix has the wrong shape")
        for i, n in enumerate(G.moduli):
            for j, m in enumerate(G.moduli):
                if qz(n * M[i][j]) or qz(m * M[i][j]):
                    raise ValueError(f"b(e_{i}, e_{j}) = {M[i][j]} is not compatible with the moduli")
        object.__setattr__(self, "matrix", M)

    def __call__(self, x, y) -> Fraction:
        x, y = _coords(x), _coords(y)
        return qz(sum(a * b * self.matrix[i][j] for i, a in enumerate(x) if a for j, b in enumerate(y) if b))

    def is_symmetric(self) -> bool:
        r = self.group.rank
        return all(self.matrix[i][j] == self.matrix[j][i] for i in range(r) for j in range(r))

    def is_alternating(self) -> bool:
        r = self.group.rank
        return self.is_symmetric_skew() and all(self.matrix[i][i] == 0 for i in range(r))

    def is_symmetric_skew(self) -> bool:
        r = self.group.rank
        return all(qz(self.matrix[i][j] + self.matrix[j][i]) == 0 for i in range(r) for j in range(r))

    def adjoint(self) -> GroupHom:
        """The map ``x -> b(x, -)`` into the dual group."""
        G = self.group
        rows = [[int(n * self.matrix[i][j]) for i in range(G.rank)] for j, n in enumerate(G.moduli)]
        return GroupHom(G, G, tuple(tuple(r) for r in rows))

    def radical(self) -> Span:
        return kernel_cokernel(self.adjoint())[0].span

    def __add__(self, other: "BilForm") -> "BilForm":
        return BilForm(self.group, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def __neg__(self) -> "BilForm":
        return BilForm(self.group, tuple(tuple(-a for a in r) for r in self.matrix))

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "matrix": [[qz_str(v) for v in r] for r in self.matrix]}

    @classmethod
    def from_json(cls, obj) -> "BilForm":
        return cls(FinAbGroup.from_json(obj["group"]), tuple(tuple(parse_qz(v) for v in r) for r in obj["matrix"]))


@dataclass(frozen=True)
class QuadForm:
    group: FinAbGroup
    diag: tuple[Fraction, ...]
    cross: tuple[Fraction, ...] = ()

    def __post_init__(self):
        G = self.group
        diag = tuple(qz(v) for v in self.diag)
        pairs = _pairs(G.rank)
        cross = tuple(qz(v) for v in self.cross) if self.cross else (Fraction(0),) * len(pairs)
        if len(diag) != G.rank or len(cross) != len(pairs):
            raise ValueError("form data does not match the group rank")
        for d, n in zip(diag, G.moduli):
            if qz(_diag_modulus(n) * d):
                raise ValueError(f"q(e) = {d} is not allowed on Z{n}")
        for c, (i, j) in zip(cross, pairs):
            if qz(math.gcd(G.moduli[i], G.moduli[j]) * c):
                raise ValueError(f"b(e_{i}, e_{j}) = {c} is not allowed")
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "cross", cross)

    @classmethod
    def zero(cls, G: FinAbGroup) -> "QuadForm":
        return cls(G, (0,) * G.rank)

    @classmethod
    def from_bilinear_data(cls, G: FinAbGroup, diag: Sequence, bmatrix) -> "QuadForm":
        """Build from q(e_i) and a full matrix of b(e_i, e_j)."""
        return cls(G, tuple(diag), tuple(bmatrix[i][j] for i, j in _pairs(G.rank)))

    def c(self, i: int, j: int) -> Fraction:
        if i == j:
            return qz(2 * self.diag[i])
        if i > j:
            i, j = j, i
        r = self.group.rank
        return self.cross[i * r - i * (i + 1) // 2 + (j - i - 1)]

    def __call__(self, x) -> Fraction:
        return evaluate(self, x)

    @cached_property
    def bilinear(self) -> BilForm:
        r = self.group.rank
        return BilForm(self.group, tuple(tuple(self.c(i, j) for j in range(r)) for i in range(r)))

    def b(self, x, y) -> Fraction:
        return self.bilinear(x, y)

    def __add__(self, other: "QuadForm") -> "QuadForm":
        _same(self.group, other.group)
        return QuadForm(self.group, tuple(a + b for a, b in zip(self.diag, other.diag)),
                        tuple(a + b for a, b in zip(self.cross, other.cross)))

    def __neg__(self) -> "QuadForm":
        return QuadForm(self.group, tuple(-a for a in self.diag), tuple(-a for a in self.cross))

    def __sub__(self, other: "QuadForm") -> "QuadForm":
        return self + (-other)

    @cached_property
    def denominator(self) -> int:
        return reduce(math.lcm, (v.denominator for v in self.diag + self.cross), 1)

    @cached_property
    def _table(self) -> np.ndarray:
        G, D = self.group, self.denominator
        if G.rank == 0:
            return np.zeros(1, dtype=np.int64)
        X = np.indices(G.moduli, dtype=np.int64).reshape(G.rank, -1)
        acc = np.zeros(X.shape[1], dtype=np.int64)
        for i, d in enumerate(self.diag):
            if d:
                acc = (acc + (X[i] * X[i] % D) * int(d * D)) % D
        for (i, j), c in zip(_pairs(G.rank), self.cross):
            if c:
                acc = (acc + (X[i] * X[j] % D) * int(c * D)) % D
        return acc

    def table(self, denominator: int | None = None) -> np.ndarray:
        """Numerators of q over all elements (lexicographic order) over ``denominator``."""
        D = denominator or self.denominator
        if D % self.denominator:
            raise ValueError("denominator must be a multiple of the form's denominator")
        return self._table * (D // self.denominator)

    def values(self) -> list[Fraction]:
        D = self.denominator
        return [Fraction(int(v), D) for v in self._table]

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "diag": [qz_str(v) for v in self.diag],
            "cross": [qz_str(v) for v in self.cross],
        }

    @classmethod
    def from_json(cls, obj, group: FinAbGroup | None = None) -> "QuadForm":
        G = FinAbGroup.from_json(obj["group"]) if "group" in obj else group
        return cls(G, tuple(parse_qz(v) for v in obj["diag"]), tuple(parse_qz(v) for v in obj.get("cross", [])))


def _same(G: FinAbGroup, H: FinAbGroup) -> None:
    if G.moduli != H.moduli:
        raise ValueError(f"group mismatch: {G.moduli} vs {H.moduli}")


def evaluate(q: QuadForm, x) -> Fraction:
    x = q.group.elt(x)
    total = sum((a * a * d for a, d in zip(x, q.diag) if a), Fraction(0))
    for (i, j), c in zip(_pairs(q.group.rank), q.cross):
        if c and x[i] and x[j]:
            total += x[i] * x[j] * c
    return qz(total)


def assoc_bilinear(q: QuadForm) -> BilForm:
    return q.bilinear


def radical(b: BilForm) -> Span:
    return b.radical()


def is_nondegenerate(q: QuadForm) -> bool:
    # the adjoint is an endomorphism of A, so its kernel and cokernel have equal order
    return cokernel_order(q.bilinear.adjoint()) == 1


def quad_group(A: FinAbGroup) -> tuple[FinAbGroup, list[QuadForm]]:
    """Quad(A) as a product of cyclic groups with one generating form per factor."""
    r, mods, gens = A.rank, [], []
    zero_c = (Fraction(0),) * len(_pairs(r))
    for i, n in enumerate(A.moduli):
        m = _diag_modulus(n)
        mods.append(m)
        gens.append(QuadForm(A, tuple(Fraction(1, m) if k == i else 0 for k in range(r)), zero_c))
    for p, (i, j) in enumerate(_pairs(r)):
        g = math.gcd(A.moduli[i], A.moduli[j])
        mods.append(g)
        gens.append(QuadForm(A, (0,) * r, tuple(Fraction(1, g) if k == p else 0 for k in range(len(zero_c)))))
    return FinAbGroup(tuple(mods)), gens


def quad_coords(q: QuadForm) -> tuple[int, ...]:
    """Coordinates of ``q`` with respect to the generators of :func:`quad_group`."""
    A = q.group
    out = [int(d * _diag_modulus(n)) for d, n in zip(q.diag, A.moduli)]
    out += [int(c * math.gcd(A.moduli[i], A.moduli[j])) for c, (i, j) in zip(q.cross, _pairs(A.rank))]
    return tuple(out)


def form_from_coords(A: FinAbGroup, coords: Sequence[int]) -> QuadForm:
    r = A.rank
    diag = [Fraction(c, _diag_modulus(n)) for c, n in zip(coords[:r], A.moduli)]
    cross = [Fraction(c, math.gcd(A.moduli[i], A.moduli[j])) for c, (i, j) in zip(coords[r:], _pairs(r))]
    return QuadForm(A, tuple(diag), tuple(cross))


def enumerate_forms(A: FinAbGroup, nondegenerate_only: bool = False) -> list[QuadForm]:
    check_size(A.order, 64, "form enumeration group")
    Q, _ = quad_group(A)
    out = []
    for coords in Q.elements():
        if nondegenerate_only and _adjoint_cokernel(A, coords) != 1:
            continue
        out.append(form_from_coords(A, coords))
    return out


def _adjoint_cokernel(A: FinAbGroup, coords: Sequence[int]) -> int:
    # integer matrix of x -> b(x, -) straight from Quad(A) coordinates
    r, mods = A.rank, A.moduli
    M = [[0] * r for _ in range(r)]
    for i, n in enumerate(mods):
        M[i][i] = coords[i] if n % 2 == 0 else 2 * coords[i]
    for c, (i, j) in zip(coords[r:], _pairs(r)):
        g = math.gcd(mods[i], mods[j])
        M[j][i] = mods[j] // g * c
        M[i][j] = mods[i] // g * c
    return cokernel_order(GroupHom(A, A, tuple(tuple(row) for row in M)))


# ---------------------------------------------------------------------------
# Metric groups
# ---------------------------------------------------------------------------


class DegenerateFormError(ValueError):
    pass


@dataclass(frozen=True)
class MetricGroup:
    group: FinAbGroup
    form: QuadForm

    def __post_init__(self):
        _same(self.group, self.form.group)
        if not is_nondegenerate(self.form):
            raise DegenerateFormError("quadratic form is degenerate")

    @classmethod
    def of(cls, q: QuadForm) -> "MetricGroup":
        return cls(q.group, q)

    @property
    def order(self) -> int:
        return self.group.order

    def q(self, x) -> Fraction:
        return evaluate(self.form, x)

    def b(self, x, y) -> Fraction:
        return self.form.b(x, y)

    def reverse(self) -> "MetricGroup":
        return MetricGroup(self.group, -self.form)

    def __add__(self, other: "MetricGroup") -> "MetricGroup":
        return direct_sum(self, other)

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "form": self.form.to_json()}

    @classmethod
    def from_json(cls, obj) -> "MetricGroup":
        G = FinAbGroup.from_json(obj["group"])
        return cls(G, QuadForm.from_json(obj["form"], G))


def direct_sum(*ms: MetricGroup) -> MetricGroup:
    return MetricGroup.of(form_sum(*(m.form for m in ms)))


def form_sum(*qs: QuadForm) -> QuadForm:
    G = group_sum(*(q.group for q in qs))
    diag = [d for q in qs for d in q.diag]
    offsets = np.cumsum([0] + [q.group.rank for q in qs]).tolist()
    B = [[Fraction(0)] * G.rank for _ in range(G.rank)]
    for q, off in zip(qs, offsets):
        for i in range(q.group.rank):
            for j in range(q.group.rank):
                B[off + i][off + j] = q.c(i, j)
    return QuadForm.from_bilinear_data(G, diag, B)


# ---------------------------------------------------------------------------
# Gauss sums and central charge
# ---------------------------------------------------------------------------


def gauss_sum(m: MetricGroup | QuadForm) -> tuple[complex, int]:
    """Return ``(sigma, |sigma|^2)``; the second entry is exact.

    ``|sigma|^2 = |A| |rad|`` when q vanishes on the radical and 0 otherwise.
    """
    q = m.form if isinstance(m, MetricGroup) else m
    D = q.denominator
    phases = np.exp(2j * np.pi * (q.table() % D) / D)
    sigma = complex(phases.sum())
    rad = radical(q.bilinear)
    exact = q.group.order * rad.order if all(evaluate(q, g) == 0 for g in rad.gens) else 0
    if abs(abs(sigma) ** 2 - exact) > 1e-6 * max(1, exact):
        raise ArithmeticError(f"Gauss sum {sigma} inconsistent with exact |sigma|^2 = {exact}")
    if isinstance(m, MetricGroup) and exact != q.group.order:
        raise DegenerateFormError("|sigma|^2 differs from |A| for a metric group")
    return sigma, exact


def central_charge(m: MetricGroup) -> int:
    """The k mod 8 with sigma / sqrt|A| = exp(2 pi i k / 8)."""
    sigma, _ = gauss_sum(m)
    z = sigma / math.sqrt(m.order)
    for k in range(8):
        if abs(z - cmath.exp(2j * math.pi * k / 8)) < 1e-6:
            return k
    raise ArithmeticError(f"normalized Gauss sum {z} is not an 8th root of unity")


# ---------------------------------------------------------------------------
# Orthogonal complements and condensation
# ---------------------------------------------------------------------------


def orthogonal_complement(m: MetricGroup | QuadForm, H: Iterable) -> list[tuple[int, ...]]:
    q = m.form if isinstance(m, MetricGroup) else m
    A = q.group
    H = [A.elt(h) for h in H]
    H = [h for h in H if any(h)]
    if not H:
        return A.basis()
    orders = tuple(A.order_of(h) for h in H)
    T = FinAbGroup(orders)
    images = [tuple(int(o * q.b(e, h)) for o, h in zip(orders, H)) for e in A.basis()]
    ker, _ = kernel_cokernel(GroupHom.from_images(A, T, images))
    return ker.generators


class NotIsotropicError(ValueError):
    pass


@dataclass
class Condensation:
    """``H^perp / H`` with its induced form and the maps relating it to the parent."""

    parent: MetricGroup
    H: list[tuple[int, ...]]
    perp: Span
    quotient: MetricGroup
    lifts: list[tuple[int, ...]]
    _proj: GroupHom

    def project(self, x) -> tuple[int, ...]:
        """Class of ``x`` (which must lie in ``H^perp``) in the quotient."""
        return self._proj(self.perp.coords(x))

    def lift(self, y) -> tuple[int, ...]:
        return self.parent.group.combine(_coords(y), self.lifts)


def condense(m: MetricGroup, H: Iterable) -> Condensation:
    A, q = m.group, m.form
    H = [A.elt(h) for h in H]
    for i, h in enumerate(H):
        if q(h) != 0:
            raise NotIsotropicError(f"q({h}) = {q(h)} is nonzero")
        for k in H[:i]:
            if q.b(h, k) != 0:
                raise NotIsotropicError(f"b({k}, {h}) is nonzero")
    perp = Span(A, orthogonal_complement(m, H))
    S = perp.structure
    Hc = [perp.coords(h) for h in H if any(h)]
    rel = GroupHom.from_images(FinAbGroup(tuple(S.order_of(c) for c in Hc)), S, Hc)
    _, coker = kernel_cokernel(rel)
    C = coker.group
    lifts = [A.combine(l, perp.basis) for l in coker.lifts]
    r = C.rank
    diag = [q(l) for l in lifts]
    B = [[q.b(lifts[i], lifts[j]) for j in range(r)] for i in range(r)]
    form = QuadForm.from_bilinear_data(C, diag, B)
    for l, d in zip(lifts, diag):
        for h in H:
            assert q(A.add(l, h)) == d, "induced form is not constant on cosets"
    quotient = MetricGroup(C, form)
    if quotient.order * Span(A, H).order ** 2 != A.order:
        raise ArithmeticError("condensation has the wrong order")
    return Condensation(m, H, perp, quotient, lifts, coker.projection)


# ---------------------------------------------------------------------------
# Isometries
# ---------------------------------------------------------------------------


def _order_table(G: FinAbGroup) -> np.ndarray:
    if G.rank == 0:
        return np.ones(1, dtype=np.int64)
    X = np.indices(G.moduli, dtype=np.int64).reshape(G.rank, -1)
    orders = np.ones(X.shape[1], dtype=np.int64)
    for i, n in enumerate(G.moduli):
        orders = np.lcm(orders, n // np.gcd(X[i], n))
    return orders


def value_census(m: MetricGroup, denominator: int | None = None) -> Counter:
    D = denominator or m.form.denominator
    return Counter(zip(_order_table(m.group).tolist(), m.form.table(D).tolist()))


def isometry_search(
    m1: MetricGroup,
    m2: MetricGroup,
    pinned: Sequence[tuple[Sequence[int], Sequence[int]]] = (),
    limit: int | None = None,
) -> GroupHom | None:
    """Find a group isomorphism ``f: m1 -> m2`` with ``q2 o f = q1`` and ``f(x) = y`` for pinned pairs.

    Generator images are chosen in lexicographic order, so the result is
    deterministic.
    """
    G1, G2 = m1.group, m2.group
    check_size(max(G1.order, G2.order), 1024 if limit is None else limit, "isometry search group")
    if G1.order != G2.order:
        return None
    D = math.lcm(m1.form.denominator, m2.form.denominator)
    if value_census(m1, D) != value_census(m2, D):
        return None

    t2 = m2.form.table(D).tolist()
    orders2 = _order_table(G2).tolist()
    elems2 = list(G2.elements())
    buckets: dict[tuple[int, int], list[int]] = {}
    for idx, (o, v) in enumerate(zip(orders2, t2)):
        buckets.setdefault((o, v), []).append(idx)

    r = G1.rank
    want_q = [int(m1.q(e) * D) for e in G1.basis()]
    want_b = [[int(m1.b(e, f) * D) for f in G1.basis()] for e in G1.basis()]
    cand = [buckets.get((G1.moduli[i], want_q[i]), []) for i in range(r)]

    pins = [(G1.elt(x), G2.elt(y)) for x, y in pinned]
    pins_at: list[list] = [[] for _ in range(r + 1)]
    for x, y in pins:
        last = max((i for i, a in enumerate(x) if a), default=-1)
        pins_at[last + 1].append((x, y))
    if any(y != G2.zero for x, y in pins_at[0]):
        return None

    images: list[int] = []

    def b2(i: int, j: int) -> int:
        yi, yj = elems2[i], elems2[j]
        return (t2[G2.index(G2.add(yi, yj))] - t2[i] - t2[j]) % D

    def pins_ok(level: int) -> bool:
        for x, y in pins_at[level]:
            img = G2.combine(x, [elems2[k] for k in images])
            if img != y:
                return False
        return True

    def rec(i: int) -> bool:
        if i == r:
            return Span(G2, [elems2[k] for k in images]).order == G2.order
        for c in cand[i]:
            if all(b2(c, images[j]) == want_b[i][j] % D for j in range(i)):
                images.append(c)
                if pins_ok(i + 1) and rec(i + 1):
                    return True
                images.pop()
        return False

    if not rec(0):
        return None
    return GroupHom.from_images(G1, G2, [elems2[k] for k in images])


def is_isometry(f: GroupHom, m1: MetricGroup, m2: MetricGroup) -> bool:
    if not f.is_injective() or m1.order != m2.order:
        return False
    return all(m2.q(f(x)) == m1.q(x) for x in m1.group.elements())


def isomorphic_groups(G: FinAbGroup, H: FinAbGroup) -> bool:
    """Compare by element-order census, which determines a finite abelian group."""
    return Counter(_order_table(G).tolist()) == Counter(_order_table(H).tolist())


def form_invariant(m: MetricGroup) -> tuple:
    """A cheap isometry invariant: the (order, value) census with a fixed denominator."""
    census = value_census(m, m.form.denominator)
    return tuple(sorted((o, Fraction(v, m.form.denominator)) for (o, v), c in census.items() for _ in range(c)))


def isometry_classes(forms: Iterable[QuadForm]) -> list[MetricGroup]:
    """Representatives of the isometry classes among the nondegenerate ``forms``, in input order."""
    reps: dict[tuple, list[MetricGroup]] = {}
    out = []
    for q in forms:
        m = MetricGroup.of(q)
        key = form_invariant(m)
        bucket = reps.setdefault(key, [])
        if any(isometry_search(r, m) is not None for r in bucket):
            continue
        bucket.append(m)
        out.append(m)
    return out


def cyclic_form(n: int, numerator: int) -> QuadForm:
    """The form j -> numerator * j^2 / (2n) on Z_n for n even, numerator * j^2 / n for n odd."""
    return QuadForm(FinAbGroup((n,)), (Fraction(numerator, _diag_modulus(n)),))

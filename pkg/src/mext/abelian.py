"""Finite abelian groups presented as products of cyclic groups.

A group keeps the moduli it was built from. Nothing is normalized behind the
caller's back: the distinguished element ``t`` of ``Rep(A, t)`` and the
embeddings of dual groups are written in a fixed generator basis, so the
invariant-factor form is only computed on request.

Elements are plain tuples of ints reduced coordinatewise; :class:`GroupElt`
wraps one together with its parent for callers that want operator syntax.
The dual group of ``G`` is represented by the same moduli, with pairing
``<x, phi> = sum x_i phi_i / n_i`` in Q/Z.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from itertools import product
from typing import Iterable, Iterator, Sequence

from sympy import factorint
from sympy.utilities.iterables import partitions

MAX_EXPONENT = 2**16


class SizeGuardError(ValueError):
    """A brute-force routine was asked to run on a structure that is too large."""


def size_limit(default: int) -> int:
    env = os.environ.get("MEXT_MAX_ORDER")
    return int(env) if env else default


def check_size(n: int, default: int, what: str) -> None:
    limit = size_limit(default)
    if n > limit:
        raise SizeGuardError(
            f"{what} has size {n}, above the limit {limit} (set MEXT_MAX_ORDER to override)"
        )


# ---------------------------------------------------------------------------
# Integer linear algebra
# ---------------------------------------------------------------------------


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


@dataclass
class SNF:
    """Smith normal form ``U @ M @ V = D`` together with ``U^-1`` and ``V^-1``."""

    U: list[list[int]]
    D: list[list[int]]
    V: list[list[int]]
    Uinv: list[list[int]]
    Vinv: list[list[int]]

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.V)))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def snf(M: Sequence[Sequence[int]], rows: int | None = None, cols: int | None = None) -> SNF:
    rows = len(M) if rows is None else rows
    cols = (len(M[0]) if rows else 0) if cols is None else cols
    A = [[int(v) for v in row] for row in M]
    U, Ui, V, Vi = _identity(rows), _identity(rows), _identity(cols), _identity(cols)

    def swap_rows(a, b):
        if a != b:
            A[a], A[b] = A[b], A[a]
            U[a], U[b] = U[b], U[a]
            for r in Ui:
                r[a], r[b] = r[b], r[a]

    def swap_cols(a, b):
        if a != b:
            for r in A:
                r[a], r[b] = r[b], r[a]
            for r in V:
                r[a], r[b] = r[b], r[a]
            Vi[a], Vi[b] = Vi[b], Vi[a]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        A[dst] = [x + q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]
        for r in Ui:
            r[src] -= q * r[dst]

    def add_col(dst, src, q):
        for r in A:
            r[dst] += q * r[src]
        for r in V:
            r[dst] += q * r[src]
        Vi[src] = [x - q * y for x, y in zip(Vi[src], Vi[dst])]

    for t in range(min(rows, cols)):
        while True:
            piv = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if A[i][j] and (piv is None or abs(A[i][j]) < abs(A[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                break
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            p = A[t][t]
            clean = True
            for i in range(t + 1, rows):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
                clean = clean and A[i][t] == 0
            for j in range(t + 1, cols):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if piv is None:
            break
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
            for r in Ui:
                r[t] = -r[t]
    return SNF(U, A, V, Ui, Vi)


def smith_normal_form(M: Sequence[Sequence[int]]):
    """Return ``(U, D, V)`` with ``U M V = D`` diagonal, ``d1 | d2 | ...``, U and V unimodular."""
    s = snf(M)
    return s.U, s.D, s.V


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A] if A and B and B[0] else [
        [0] * (len(B[0]) if B else 0) for _ in A
    ]


# ---------------------------------------------------------------------------
# Groups and elements
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinAbGroup:
    moduli: tuple[int, ...]

    def __post_init__(self):
        mods = tuple(int(n) for n in self.moduli)
        if any(n < 1 for n in mods):
            raise ValueError(f"moduli must be positive, got {mods}")
        object.__setattr__(self, "moduli", mods)
        if self.exponent > MAX_EXPONENT:
            raise ValueError(f"group exponent {self.exponent} exceeds {MAX_EXPONENT}")

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @cached_property
    def exponent(self) -> int:
        return reduce(math.lcm, self.moduli, 1)

    def __len__(self) -> int:
        return self.order

    def __str__(self) -> str:
        parts = [f"Z{n}" for n in self.moduli if n > 1]
        return " x ".join(parts) if parts else "0"

    def elt(self, coords: Iterable[int]) -> tuple[int, ...]:
        coords = tuple(int(c) for c in _coords(coords))
        if len(coords) != self.rank:
            raise ValueError(f"element {coords} does not live in {self.moduli}")
        return tuple(c % n for c, n in zip(coords, self.moduli))

    def __call__(self, *coords: int) -> "GroupElt":
        return GroupElt(self, coords)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def basis(self) -> list[tuple[int, ...]]:
        return [tuple(int(i == j) % n for j, n in enumerate(self.moduli)) for i in range(self.rank)]

    def add(self, x, y) -> tuple[int, ...]:
        return tuple((a + b) % n for a, b, n in zip(_coords(x), _coords(y), self.moduli))

    def sub(self, x, y) -> tuple[int, ...]:
        return tuple((a - b) % n for a, b, n in zip(_coords(x), _coords(y), self.moduli))

    def neg(self, x) -> tuple[int, ...]:
        return tuple(-a % n for a, n in zip(_coords(x), self.moduli))

    def scale(self, k: int, x) -> tuple[int, ...]:
        return tuple(k * a % n for a, n in zip(_coords(x), self.moduli))

    def combine(self, coeffs: Sequence[int], gens: Sequence) -> tuple[int, ...]:
        out = [0] * self.rank
        for c, g in zip(coeffs, gens):
            for i, a in enumerate(_coords(g)):
                out[i] += c * a
        return self.elt(out)

    def order_of(self, x) -> int:
        return reduce(math.lcm, (n // math.gcd(a, n) for a, n in zip(_coords(x), self.moduli)), 1)

    def elements(self) -> Iterator[tuple[int, ...]]:
        """All elements in lexicographic coordinate order."""
        return product(*(range(n) for n in self.moduli))

    def index(self, x) -> int:
        """Position of ``x`` in :meth:`elements` (mixed radix)."""
        i = 0
        for a, n in zip(_coords(x), self.moduli):
            i = i * n + a % n
        return i

    def pairing(self, x, phi) -> Fraction:
        """Evaluate the character ``phi`` of the dual group at ``x``."""
        return sum((Fraction(a * b, n) for a, b, n in zip(_coords(x), _coords(phi), self.moduli)), Fraction(0)) % 1

    def dual(self) -> "FinAbGroup":
        return self

    def to_json(self) -> dict:
        return {"moduli": list(self.moduli)}

    @classmethod
    def from_json(cls, obj) -> "FinAbGroup":
        return cls(tuple(obj["moduli"]))


def Z(*moduli: int) -> FinAbGroup:
    return FinAbGroup(moduli)


def _coords(x) -> tuple[int, ...]:
    if isinstance(x, GroupElt):
        return x.coords
    return tuple(x)


@dataclass(frozen=True)
class GroupElt:
    parent: FinAbGroup
    coords: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", self.parent.elt(self.coords))

    def __add__(self, other):
        return GroupElt(self.parent, self.parent.add(self.coords, _coords(other)))

    def __sub__(self, other):
        return GroupElt(self.parent, self.parent.sub(self.coords, _coords(other)))

    def __neg__(self):
        return GroupElt(self.parent, self.parent.neg(self.coords))

    def __rmul__(self, k: int):
        return GroupElt(self.parent, self.parent.scale(k, self.coords))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    @property
    def order(self) -> int:
        return self.parent.order_of(self.coords)

    def to_json(self) -> dict:
        return {"coords": list(self.coords)}


def direct_sum(*groups: FinAbGroup) -> FinAbGroup:
    return FinAbGroup(tuple(n for g in groups for n in g.moduli))


def parse_coords(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(s) for s in text.split(",")) if text else ()


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------


class Span:
    """The subgroup of ``group`` generated by ``gens``.

    Membership, solving ``sum c_j g_j = x`` and the invariant-factor
    presentation all go through one Smith normal form of
    ``[g_1 ... g_k | diag(moduli)]``.
    """

    def __init__(self, group: FinAbGroup, gens: Iterable):
        self.group = group
        self.gens = [group.elt(g) for g in gens]

    def __repr__(self):
        return f"Span({self.group.moduli}, {self.gens})"

    @cached_property
    def _snf(self) -> SNF:
        G, k = self.group, len(self.gens)
        M = [[g[i] for g in self.gens] + [G.moduli[i] * (i == j) for j in range(G.rank)] for i in range(G.rank)]
        return snf(M, G.rank, k + G.rank)

    def solve(self, x) -> tuple[int, ...] | None:
        """Integer coefficients ``c`` with ``sum c_j g_j = x``, or None."""
        s, G = self._snf, self.group
        x = G.elt(x)
        ux = [sum(u * a for u, a in zip(row, x)) for row in s.U]
        diag = s.diagonal
        y = [0] * len(s.V)
        for i, v in enumerate(ux):
            d = diag[i] if i < len(diag) else 0
            if d == 0:
                if v != 0:
                    return None
            else:
                if v % d:
                    return None
                y[i] = v // d
        c = [sum(V_row[j] * y[j] for j in range(len(y))) for V_row in s.V]
        return tuple(c[: len(self.gens)])

    def __contains__(self, x) -> bool:
        return self.solve(x) is not None

    @cached_property
    def relations(self) -> list[tuple[int, ...]]:
        """Basis of the lattice of ``c`` with ``sum c_j g_j = 0``."""
        s, k = self._snf, len(self.gens)
        cols = range(s.rank, len(s.V))
        return [tuple(s.V[i][j] for i in range(k)) for j in cols]

    @cached_property
    def _presentation(self):
        k = len(self.gens)
        if k == 0:
            return FinAbGroup(()), [], []
        R = [[r[i] for r in self.relations] for i in range(k)]
        s = snf(R, k, len(self.relations))
        diag = s.diagonal + [0] * (k - len(s.diagonal))
        keep = [i for i in range(k) if diag[i] != 1]
        if any(diag[i] == 0 for i in keep):
            raise ArithmeticError("relation lattice not of full rank")
        lifts = [self.group.combine([s.Uinv[j][i] for j in range(k)], self.gens) for i in keep]
        rows = [s.U[i] for i in keep]
        return FinAbGroup(tuple(diag[i] for i in keep)), lifts, rows

    @property
    def structure(self) -> FinAbGroup:
        """Invariant-factor presentation of the subgroup."""
        return self._presentation[0]

    @property
    def basis(self) -> list[tuple[int, ...]]:
        """Generators of the cyclic factors of :attr:`structure`."""
        return self._presentation[1]

    def coords(self, x) -> tuple[int, ...]:
        """Coordinates of ``x`` with respect to :attr:`basis`."""
        c = self.solve(x)
        if c is None:
            raise ValueError(f"{x} is not in the subgroup")
        H, _, rows = self._presentation
        return H.elt(sum(u * a for u, a in zip(row, c)) for row in rows)

    @property
    def order(self) -> int:
        return self.structure.order

    def elements(self) -> set[tuple[int, ...]]:
        """Brute-force closure; for small groups only."""
        G = self.group
        seen = {G.zero}
        frontier = [G.zero]
        while frontier:
            nxt = []
            for x in frontier:
                for g in self.gens:
                    y = G.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return seen

    def minimal_generators(self) -> list[tuple[int, ...]]:
        """Greedy generating set drawn from the elements in lexicographic order."""
        G = self.group
        target = self.order
        out: list[tuple[int, ...]] = []
        current = Span(G, out)
        for x in sorted(self.elements()):
            if current.order == target:
                break
            if x not in current:
                out.append(x)
                current = Span(G, out)
        return out


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupHom:
    """Homomorphism given by an integer matrix; column ``i`` is the image of ``e_i``."""

    source: FinAbGroup
    target: FinAbGroup
    matrix: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        S, T = self.source, self.target
        rows = [tuple(row) for row in self.matrix] if self.matrix else [() for _ in range(T.rank)]
        if len(rows) != T.rank or any(len(r) != S.rank for r in rows):
            raise ValueError("matrix shape does not match source and target ranks")
        rows = tuple(tuple(int(v) % n for v in row) for row, n in zip(rows, T.moduli))
        object.__setattr__(self, "matrix", rows)
        for i, n in enumerate(S.moduli):
            if any(self.column(i)[k] * n % T.moduli[k] for k in range(T.rank)):
                raise ValueError(f"generator {i} of order {n} has an image of larger order")

    @classmethod
    def from_images(cls, source: FinAbGroup, target: FinAbGroup, images: Sequence) -> "GroupHom":
        images = [target.elt(y) for y in images]
        if len(images) != source.rank:
            raise ValueError("need one image per generator")
        return cls(source, target, tuple(tuple(y[k] for y in images) for k in range(target.rank)))

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.matrix)

    @property
    def images(self) -> list[tuple[int, ...]]:
        return [self.column(i) for i in range(self.source.rank)]

    def __call__(self, x) -> tuple[int, ...]:
        x = _coords(x)
        return self.target.elt(sum(a * b for a, b in zip(row, x)) for row in self.matrix)

    def compose(self, other: "GroupHom") -> "GroupHom":
        """``self`` after ``other``."""
        return GroupHom.from_images(other.source, self.target, [self(y) for y in other.images])

    def image(self) -> Span:
        return Span(self.target, self.images)

    def kernel_cokernel(self):
        return kernel_cokernel(self)

    def is_injective(self) -> bool:
        return self.image().order == self.source.order

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "matrix": [list(r) for r in self.matrix],
        }

    @classmethod
    def from_json(cls, obj, source: FinAbGroup | None = None, target: FinAbGroup | None = None) -> "GroupHom":
        source = FinAbGroup.from_json(obj["source"]) if "source" in obj else source
        target = FinAbGroup.from_json(obj["target"]) if "target" in obj else target
        return cls(source, target, tuple(tuple(r) for r in obj["matrix"]))


@dataclass
class Kernel:
    group: FinAbGroup
    generators: list[tuple[int, ...]]
    span: Span


@dataclass
class Cokernel:
    group: FinAbGroup
    projection: GroupHom
    lifts: list[tuple[int, ...]]


def kernel_cokernel(f: GroupHom) -> tuple[Kernel, Cokernel]:
    S, T = f.source, f.target
    m, n = T.rank, S.rank
    R = [list(f.matrix[k]) + [T.moduli[k] * (k == j) for j in range(m)] for k in range(m)]
    s = snf(R, m, n + m)

    # kernel: lattice of x with F x in diag(T) Z^m, projected to the source
    ker_vecs = [tuple(s.V[i][j] for i in range(n)) for j in range(s.rank, n + m)]
    kspan = Span(S, ker_vecs)
    kernel = Kernel(kspan.structure, kspan.basis, kspan)

    diag = s.diagonal
    keep = [i for i in range(m) if diag[i] != 1]
    C = FinAbGroup(tuple(diag[i] for i in keep))
    proj = GroupHom(T, C, tuple(tuple(s.U[i]) for i in keep))
    lifts = [T.elt(s.Uinv[j][i] for j in range(m)) for i in keep]
    coker = Cokernel(C, proj, lifts)

    im = f.image().order
    assert kernel.group.order * im == S.order, "kernel/image orders inconsistent"
    assert coker.group.order * im == T.order, "cokernel/image orders inconsistent"
    return kernel, coker


def cokernel_order(f: GroupHom) -> int:
    """|coker f| from a single Smith normal form."""
    T = f.target
    m, n = T.rank, f.source.rank
    R = [list(f.matrix[k]) + [T.moduli[k] * (k == j) for j in range(m)] for k in range(m)]
    return math.prod(snf(R, m, n + m).diagonal)


# ---------------------------------------------------------------------------
# Normal forms and functors
# ---------------------------------------------------------------------------


def canonical_decomposition(G: FinAbGroup) -> FinAbGroup:
    """Invariant factors d1 | d2 | ... with unit factors dropped."""
    if G.rank == 0:
        return G
    s = snf([[n * (i == j) for j in range(G.rank)] for i, n in enumerate(G.moduli)])
    return FinAbGroup(tuple(d for d in s.diagonal if d != 1))


def _gcd_product(pairs: Iterable[int]) -> FinAbGroup:
    return canonical_decomposition(FinAbGroup(tuple(pairs)))


def hom_group(A: FinAbGroup, B: FinAbGroup) -> FinAbGroup:
    return _gcd_product(math.gcd(a, b) for a in A.moduli for b in B.moduli)


def ext_group(A: FinAbGroup, B: FinAbGroup) -> FinAbGroup:
    return _gcd_product(math.gcd(a, b) for a in A.moduli for b in B.moduli)


def tensor(A: FinAbGroup, B: FinAbGroup) -> FinAbGroup:
    return _gcd_product(math.gcd(a, b) for a in A.moduli for b in B.moduli)


def wedge_power(A: FinAbGroup, k: int) -> FinAbGroup:
    from itertools import combinations

    if k not in (2, 3):
        raise ValueError("only the second and third exterior powers are supported")
    mods = canonical_decomposition(A).moduli
    return _gcd_product(reduce(math.gcd, c) for c in combinations(mods, k))


def hom_basis(A: FinAbGroup, B: FinAbGroup) -> tuple[FinAbGroup, list[GroupHom]]:
    """Hom(A, B) with one generator per pair of cyclic factors.

    The generator for ``(i, k)`` sends ``e_i`` to ``(b_k / g) f_k`` where
    ``g = gcd(a_i, b_k)``; it has order ``g``.
    """
    gens, mods = [], []
    for i, a in enumerate(A.moduli):
        for k, b in enumerate(B.moduli):
            g = math.gcd(a, b)
            images = [B.zero] * A.rank
            images[i] = tuple((b // g) * (kk == k) for kk in range(B.rank))
            gens.append(GroupHom.from_images(A, B, images))
            mods.append(g)
    return FinAbGroup(tuple(mods)), gens


def abelian_groups_of_order(n: int) -> list[FinAbGroup]:
    """One representative per isomorphism class, as elementary divisors."""
    per_prime = []
    for p, e in sorted(factorint(n).items()):
        opts = []
        for part in partitions(e):
            mods = []
            for size, mult in sorted(part.items()):
                mods += [p**size] * mult
            opts.append(mods)
        per_prime.append(opts)
    return [FinAbGroup(tuple(m for chunk in combo for m in chunk)) for combo in product(*per_prime)]


# ---------------------------------------------------------------------------
# The distinguished element t
# ---------------------------------------------------------------------------


def two_torsion(A: FinAbGroup) -> Span:
    gens = []
    for i, n in enumerate(A.moduli):
        if n % 2 == 0:
            gens.append(tuple((n // 2) * (j == i) for j in range(A.rank)))
    return Span(A, gens)


def in_doubles(A: FinAbGroup, x) -> bool:
    """Whether ``x`` lies in ``2A``; coordinatewise since A is a product."""
    return all(a % math.gcd(2, n) == 0 for a, n in zip(A.elt(x), A.moduli))


def _require_order_two(A: FinAbGroup, t) -> tuple[int, ...]:
    t = A.elt(t)
    if A.order_of(t) != 2:
        raise ValueError(f"t = {t} must have order exactly 2")
    return t


def is_split(A: FinAbGroup, t) -> bool:
    """Whether <t> is a direct summand of A.

    An element of order 2 outside 2A generates a pure subgroup of bounded
    exponent, hence a summand; an element inside 2A never does.
    """
    t = _require_order_two(A, t)
    return not in_doubles(A, t)


def complement_search(A: FinAbGroup, t) -> list[tuple[int, ...]] | None:
    """Brute-force search for a complement of <t>.

    A complement has index 2, and every index-2 subgroup is the kernel of a
    homomorphism to Z2; those are enumerated exhaustively.
    """
    check_size(A.order, 2**12, "complement_search group")
    t = _require_order_two(A, t)
    choices = [(0, 1) if n % 2 == 0 else (0,) for n in A.moduli]
    for phi in product(*choices):
        if sum(a * b for a, b in zip(phi, t)) % 2 != 1:
            continue
        ev = GroupHom.from_images(A, FinAbGroup((2,)), [(p,) for p in phi])
        ker, _ = kernel_cokernel(ev)
        B = ker.span
        if t in B or B.order * 2 != A.order:
            continue
        return B.minimal_generators()
    return None

"""Explicit 3-cocycles on finite abelian groups and the trilinear invariants built from them.

Standard representatives, with carries taken on representatives in
``[0, n)``:

    type I    (i)       c x_i carry_i(y, z) / n_i
    type II   (i < j)   c x_i carry_j(y, z) / n_i
    type III  (i<j<k)   c x_i y_j z_k / gcd(n_i, n_j, n_k)

Type II is the cup product of the character ``x -> x_i / n_i`` with the
integral carry cocycle of the j-th factor; its class only depends on c modulo
``gcd(n_i, n_j)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, permutations, product
from typing import Callable, Mapping, Sequence

import numpy as np

from .abelian import FinAbGroup, check_size
from .extensions import BaseCategory
from .filtration import AltForm2, _addition_table, _element_matrix, Q_E, xi
from .qforms import BilForm, qz

TYPES = ("I", "II", "III")


def _g(A: FinAbGroup, idx: Sequence[int]) -> int:
    return reduce(math.gcd, (A.moduli[i] for i in idx))


@dataclass(frozen=True)
class Cocycle3:
    group: FinAbGroup
    typeI: tuple[int, ...] = ()
    typeII: Mapping[tuple[int, int], int] = field(default_factory=dict)
    typeIII: Mapping[tuple[int, int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        A = self.group
        t1 = tuple(self.typeI) if self.typeI else (0,) * A.rank
        if len(t1) != A.rank:
            raise ValueError("need one type I coefficient per cyclic factor")
        t1 = tuple(c % n for c, n in zip(t1, A.moduli))
        t2, t3 = {}, {}
        for (i, j), c in dict(self.typeII).items():
            if not 0 <= i < j < A.rank:
                raise ValueError(f"type II index {(i, j)} out of range")
            if c % _g(A, (i, j)):
                t2[(i, j)] = c % _g(A, (i, j))
        for (i, j, k), c in dict(self.typeIII).items():
            if not 0 <= i < j < k < A.rank:
                raise ValueError(f"type III index {(i, j, k)} out of range")
            if c % _g(A, (i, j, k)):
                t3[(i, j, k)] = c % _g(A, (i, j, k))
        object.__setattr__(self, "typeI", t1)
        object.__setattr__(self, "typeII", dict(sorted(t2.items())))
        object.__setattr__(self, "typeIII", dict(sorted(t3.items())))

    def __hash__(self):
        return hash((self.group, self.typeI, tuple(self.typeII.items()), tuple(self.typeIII.items())))

    def __call__(self, x, y, z) -> Fraction:
        A = self.group
        x, y, z = A.elt(x), A.elt(y), A.elt(z)
        n = A.moduli
        carry = [int(y[i] + z[i] >= n[i]) for i in range(A.rank)]
        total = Fraction(0)
        for i, c in enumerate(self.typeI):
            if c and carry[i]:
                total += Fraction(c * x[i], n[i])
        for (i, j), c in self.typeII.items():
            if carry[j]:
                total += Fraction(c * x[i], n[i])
        for (i, j, k), c in self.typeIII.items():
            total += Fraction(c * x[i] * y[j] * z[k], _g(A, (i, j, k)))
        return qz(total)

    def __add__(self, other: "Cocycle3") -> "Cocycle3":
        keys2 = set(self.typeII) | set(other.typeII)
        keys3 = set(self.typeIII) | set(other.typeIII)
        return Cocycle3(
            self.group,
            tuple(a + b for a, b in zip(self.typeI, other.typeI)),
            {k: self.typeII.get(k, 0) + other.typeII.get(k, 0) for k in keys2},
            {k: self.typeIII.get(k, 0) + other.typeIII.get(k, 0) for k in keys3},
        )

    def scale(self, c: int) -> "Cocycle3":
        return Cocycle3(
            self.group,
            tuple(c * v for v in self.typeI),
            {k: c * v for k, v in self.typeII.items()},
            {k: c * v for k, v in self.typeIII.items()},
        )

    def table(self) -> tuple[np.ndarray, int]:
        """Numerators ``W[x, y, z]`` over the exponent of A."""
        A = self.group
        check_size(A.order, 64, "3-cocycle table group")
        N = A.exponent
        X = _element_matrix(A)
        size = A.order
        W = np.zeros((size, size, size), dtype=np.int64)
        n = A.moduli
        carry = [(X[i][:, None] + X[i][None, :] >= n[i]).astype(np.int64) for i in range(A.rank)]
        for i, c in enumerate(self.typeI):
            if c:
                W += (c * (N // n[i]) * X[i])[:, None, None] * carry[i][None, :, :]
        for (i, j), c in self.typeII.items():
            W += (c * (N // n[i]) * X[i])[:, None, None] * carry[j][None, :, :]
        for (i, j, k), c in self.typeIII.items():
            s = c * (N // _g(A, (i, j, k)))
            W += s * X[i][:, None, None] * X[j][None, :, None] * X[k][None, None, :] % N
        return W % N, N

    def to_json(self) -> dict:
        return {
            "group": self.group.to_json(),
            "typeI": list(self.typeI),
            "typeII": {f"{i},{j}": c for (i, j), c in self.typeII.items()},
            "typeIII": {f"{i},{j},{k}": c for (i, j, k), c in self.typeIII.items()},
        }

    @classmethod
    def from_json(cls, obj) -> "Cocycle3":
        A = FinAbGroup.from_json(obj["group"])
        key = lambda s: tuple(int(v) for v in s.split(","))
        return cls(
            A,
            tuple(obj.get("typeI", [])),
            {key(k): v for k, v in obj.get("typeII", {}).items()},
            {key(k): v for k, v in obj.get("typeIII", {}).items()},
        )


def standard_cocycle(A: FinAbGroup, kind: str, indices: Sequence[int], coefficient: int = 1) -> Cocycle3:
    idx = tuple(indices)
    if kind == "I":
        if len(idx) != 1 or not 0 <= idx[0] < A.rank:
            raise ValueError("type I takes one index")
        return Cocycle3(A, tuple(coefficient if k == idx[0] else 0 for k in range(A.rank)))
    if kind == "II":
        if len(idx) != 2:
            raise ValueError("type II takes two indices")
        return Cocycle3(A, (), {idx: coefficient})
    if kind == "III":
        if len(idx) != 3:
            raise ValueError("type III takes three indices")
        return Cocycle3(A, (), {}, {idx: coefficient})
    raise ValueError(f"unknown cocycle type {kind!r}")


def is_cocycle(omega: Cocycle3) -> bool:
    """Brute-force check of the 3-cocycle identity over A^4."""
    A = omega.group
    check_size(A.order, 16, "cocycle identity check group")
    W, N = omega.table()
    S = _addition_table(A)
    s = A.order
    w, x, y, z = np.ix_(range(s), range(s), range(s), range(s))
    d = (W[x, y, z] - W[S[w, x], y, z] + W[w, S[x, y], z] - W[w, x, S[y, z]] + W[w, x, y]) % N
    return not d.any()


# ---------------------------------------------------------------------------
# Trilinear forms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trilinear:
    """A trilinear form, stored by its values on generator triples."""

    group: FinAbGroup
    values: tuple[tuple[tuple[Fraction, ...], ...], ...]

    def __post_init__(self):
        A = self.group
        r = A.rank
        V = tuple(tuple(tuple(qz(v) for v in row) for row in plane) for plane in self.values)
        if len(V) != r or any(len(p) != r or any(len(row) != r for row in p) for p in V):
            raise ValueError("trilinear values have the wrong shape")
        for i, j, k in product(range(r), repeat=3):
            if qz(_g(A, (i, j, k)) * V[i][j][k]):
                raise ValueError(f"tau(e_{i}, e_{j}, e_{k}) is incompatible with the moduli")
        object.__setattr__(self, "values", V)

    @classmethod
    def from_function(cls, A: FinAbGroup, f: Callable) -> "Trilinear":
        basis = A.basis()
        return cls(A, tuple(tuple(tuple(f(a, b, c) for c in basis) for b in basis) for a in basis))

    @classmethod
    def zero(cls, A: FinAbGroup) -> "Trilinear":
        return cls.from_function(A, lambda *_: 0)

    def __call__(self, x, y, z) -> Fraction:
        A = self.group
        x, y, z = A.elt(x), A.elt(y), A.elt(z)
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                for j, b in enumerate(y):
                    if b:
                        for k, c in enumerate(z):
                            if c:
                                total += a * b * c * self.values[i][j][k]
        return qz(total)

    def is_alternating(self) -> bool:
        r = self.group.rank
        V = self.values
        for i, j, k in product(range(r), repeat=3):
            if len({i, j, k}) < 3 and V[i][j][k]:
                return False
            if qz(V[i][j][k] + V[j][i][k]) or qz(V[i][j][k] + V[i][k][j]):
                return False
        return True

    def is_zero(self) -> bool:
        return not any(v for p in self.values for row in p for v in row)

    def table(self, denominator: int) -> np.ndarray:
        """Numerators ``T[x, y, z]`` over ``denominator`` for all triples."""
        A = self.group
        check_size(A.order, 64, "trilinear table group")
        V = np.array([[[int(v * denominator) for v in row] for row in p] for p in self.values], dtype=np.int64)
        if any(v * denominator % 1 for p in self.values for row in p for v in row):
            raise ValueError("denominator does not clear the stored values")
        X = _element_matrix(A)
        return np.einsum("ix,jy,kz,ijk->xyz", X, X, X, V) % denominator

    def to_json(self) -> dict:
        from .qforms import qz_str

        return {"group": self.group.to_json(), "values": [[[qz_str(v) for v in row] for row in p] for p in self.values]}


def matches_function(tau: Trilinear, f: Callable) -> bool:
    """Compare the stored form against direct evaluation on every triple."""
    A = tau.group
    els = list(A.elements())
    return all(tau(x, y, z) == qz(f(x, y, z)) for x in els for y in els for z in els)


def alternator_function(omega: Cocycle3) -> Callable:
    def alt(x, y, z):
        args = (x, y, z)
        total = Fraction(0)
        for perm in permutations(range(3)):
            sign = _sign(perm)
            total += sign * omega(*(args[p] for p in perm))
        return qz(total)

    return alt


def _sign(perm) -> int:
    s = 1
    for a, b in combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            s = -s
    return s


def alternator(omega: Cocycle3) -> Trilinear:
    return Trilinear.from_function(omega.group, alternator_function(omega))


def wedge3_functionals(A: FinAbGroup) -> list[Trilinear]:
    """Generators of Hom(wedge^3 A, Q/Z): the alternating forms with a single orbit of nonzero values."""
    out = []
    r = A.rank
    for i, j, k in combinations(range(r), 3):
        g = _g(A, (i, j, k))

        def f(x, y, z, i=i, j=j, k=k, g=g):
            total = Fraction(0)
            for perm in permutations((0, 1, 2)):
                a, b, c = ((x, y, z)[p] for p in perm)
                total += _sign(perm) * Fraction(a[i] * b[j] * c[k], g)
            return qz(total)

        out.append(Trilinear.from_function(A, f))
    return out


# ---------------------------------------------------------------------------
# Transgression
# ---------------------------------------------------------------------------


@dataclass
class Cochain2:
    group: FinAbGroup
    table: np.ndarray  # numerators over denominator, indexed [y, z]
    denominator: int

    def __call__(self, y, z) -> Fraction:
        A = self.group
        return Fraction(int(self.table[A.index(A.elt(y)), A.index(A.elt(z))]), self.denominator) % 1

    def is_cocycle(self) -> bool:
        A, T, N = self.group, self.table, self.denominator
        S = _addition_table(A)
        s = A.order
        a, b, c = np.ix_(range(s), range(s), range(s))
        return not ((T[b, c] - T[S[a, b], c] + T[a, S[b, c]] - T[a, b]) % N).any()

    def alternating_form(self) -> AltForm2:
        A = self.group
        basis = A.basis()
        M = [[self(e, f) - self(f, e) for f in basis] for e in basis]
        return AltForm2(BilForm(A, tuple(map(tuple, M))))

    def alternating_is_bilinear(self) -> bool:
        beta = self.alternating_form()
        els = list(self.group.elements())
        return all(beta(y, z) == qz(self(y, z) - self(z, y)) for y in els for z in els)


def mu_from_omega(omega: Cocycle3, x) -> Cochain2:
    """mu_x(y, z) = omega(x, y, z) + omega(y, z, x) - omega(y, x, z)."""
    A = omega.group
    check_size(A.order, 32, "transgression group")
    W, N = omega.table()
    i = A.index(A.elt(x))
    T = (W[i, :, :] + W[:, :, i] - W[:, i, :]) % N
    return Cochain2(A, T, N)


# ---------------------------------------------------------------------------
# The trilinear form attached to an assignment x -> beta_x
# ---------------------------------------------------------------------------


class AssignmentError(ValueError):
    pass


def _star_int(M1: np.ndarray, M2: np.ndarray, t: np.ndarray, N: int) -> np.ndarray:
    # the twisted product on integer matrices over N (N even)
    x1, x2 = (2 * (M1 @ t % N)) // N, (2 * (M2 @ t % N)) // N
    return (M1 + M2 + (np.outer(x1, x2) - np.outer(x2, x1)) * (N // 2)) % N


def extend_assignment(base: BaseCategory, on_generators: Sequence[AltForm2]) -> dict[tuple[int, ...], AltForm2]:
    """Extend beta from the generators of A to all of A by star-additivity."""
    A = base.A
    if len(on_generators) != A.rank:
        raise AssignmentError("need one form per generator")
    N = 2 * A.exponent
    t = np.array(base.t, dtype=np.int64)
    gens = [np.array([[int(v * N) for v in row] for row in b.form.matrix], dtype=np.int64).reshape(A.rank, A.rank)
            for b in on_generators]
    zero = np.zeros((A.rank, A.rank), dtype=np.int64)
    for g, n in zip(gens, A.moduli):
        acc = zero
        for _ in range(n):
            acc = _star_int(acc, g, t, N)
        if acc.any():
            raise AssignmentError("a generator's form does not have order dividing its modulus")
    # build along coordinate paths: beta_x = beta_{x - e_p} * beta_{e_p}
    mats: dict[tuple[int, ...], np.ndarray] = {}
    for x in A.elements():
        if not any(x):
            mats[x] = zero
            continue
        p = max(i for i, a in enumerate(x) if a)
        mats[x] = _star_int(mats[A.sub(x, A.basis()[p])], gens[p], t, N)
    return {x: AltForm2(BilForm(A, tuple(tuple(Fraction(int(v), N) for v in row) for row in M)))
            for x, M in mats.items()}


def _assignment_array(base: BaseCategory, assignment: Mapping) -> tuple[np.ndarray, int]:
    """Integer matrices ``M[x]`` of beta_x over ``2 exp(A)``, in element order."""
    A = base.A
    N = 2 * A.exponent
    els = list(A.elements())
    M = np.array([[[int(v * N) for v in row] for row in assignment[x].form.matrix] for x in els], dtype=np.int64)
    return M.reshape(len(els), A.rank, A.rank), N


def _xi_array(base: BaseCategory, M: np.ndarray, N: int) -> np.ndarray:
    """``xi[x, i] = 2 beta_x(e_i, t)`` in {0, 1}."""
    t = np.array(base.t, dtype=np.int64)
    return (2 * (M @ t % N)) // N


def check_additive(base: BaseCategory, assignment: Mapping) -> bool:
    """beta_{x+y} = beta_x * beta_y for all x, y."""
    A = base.A
    if A.rank == 0:
        return True
    M, N = _assignment_array(base, assignment)
    xi_ = _xi_array(base, M, N)
    add = _addition_table(A)
    twist = (xi_[:, None, :, None] * xi_[None, :, None, :] - xi_[:, None, None, :] * xi_[None, :, :, None]) * (N // 2)
    rhs = M[:, None] + M[None, :] + twist
    return not ((M[add] - rhs) % N).any()


def is_isotropic_assignment(base: BaseCategory, assignment: Mapping) -> bool:
    """Q_E(beta_x, x) is trivial for every x."""
    return all(not any(Q_E(beta, base, x)) for x, beta in assignment.items())


def tau_function(base: BaseCategory, assignment: Mapping) -> Callable:
    A = base.A

    def tau(x, y, z):
        beta = assignment[A.elt(x)]
        return qz(Fraction(xi(beta, base, y) * xi(beta, base, z), 2) + beta(y, z))

    return tau


def tau_table(base: BaseCategory, assignment: Mapping) -> tuple[np.ndarray, int]:
    """Numerators of ``tau_function`` on all triples, over ``2 exp(A)``."""
    A = base.A
    check_size(A.order, 64, "tau table group")
    M, N = _assignment_array(base, assignment)
    X = _element_matrix(A)
    t = np.array(base.t, dtype=np.int64)
    # beta_x(y, z) and 2 beta_x(y, t)
    B = np.einsum("iy,xij,jz->xyz", X, M, X) % N
    XI = (2 * (np.einsum("iy,xij,j->xy", X, M, t) % N)) // N
    return (B + XI[:, :, None] * XI[:, None, :] * (N // 2)) % N, N


def tau_from_mu(assignment: Mapping | Sequence[AltForm2], base: BaseCategory, check: bool = True) -> Trilinear:
    """tau(x, y, z) = xi_x(y) xi_x(z) / 2 + beta_x(y, z), stored on generators."""
    A = base.A
    if not isinstance(assignment, Mapping):
        assignment = extend_assignment(base, assignment)
    assignment = {A.elt(x): b for x, b in assignment.items()}
    if check and not check_additive(base, assignment):
        raise AssignmentError("assignment is not additive for the twisted product")
    tau = Trilinear.from_function(A, tau_function(base, assignment))
    if check:
        T, N = tau_table(base, assignment)
        if not np.array_equal(tau.table(N), T):
            raise AssignmentError("tau is not trilinear")
    return tau


def t_alternating(tau: Trilinear | Callable, base: BaseCategory) -> bool:
    """tau(x, x + t, y) = 0 and tau(x, y + t, y) = 0 for all x, y."""
    A, t = base.A, base.t
    if isinstance(tau, Trilinear) and A.order <= 64:
        N = 2 * A.exponent
        T = tau.table(N)
        s = A.order
        shift = np.array([A.index(A.add(x, t)) for x in A.elements()])
        idx = np.arange(s)
        return not T[idx[:, None], shift[:, None], idx[None, :]].any() and \
            not T[idx[:, None], shift[None, :], idx[None, :]].any()
    els = list(A.elements())
    return all(tau(x, A.add(x, t), y) == 0 and tau(x, A.add(y, t), y) == 0 for x in els for y in els)


def omega_assignment(omega: Cocycle3) -> dict[tuple[int, ...], AltForm2]:
    """x -> alternating form of mu_x, for the Tannakian specialization."""
    return {x: mu_from_omega(omega, x).alternating_form() for x in omega.group.elements()}

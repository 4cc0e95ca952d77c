"""Filtration factors of Mext(Rep(A, t)) and the cohomology bookkeeping behind them.

The four factors are

* the cokernel of ``kappa^t: Hom(A, A^) -> Quad(A)``,
* the kernel of ``theta^t`` on the epsilon-symmetric abelian 2-cocycles,
* the third exterior power of A,
* ``Hom(A, Z2)`` when <t> splits off, and 0 otherwise.

Abelian 2-cocycles with values in A^ are handled in the carry model: for
a matrix ``m`` with ``m[i][j]`` taken mod ``gcd(n_i, n_j)``,

    L_{x,y}(z) = sum_{i,j} carry_i(x, y) m[i][j] z_j / n_j,

where ``carry_i(x, y)`` is 1 when ``x_i + y_i`` overflows ``n_i``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, combinations_with_replacement

import numpy as np

from .abelian import (
    FinAbGroup,
    GroupHom,
    canonical_decomposition,
    check_size,
    direct_sum,
    ext_group,
    hom_basis,
    hom_group,
    is_split,
    kernel_cokernel,
    tensor,
    two_torsion,
    wedge_power,
)
from .extensions import BaseCategory
from .qforms import BilForm, QuadForm, quad_coords, quad_group, qz


# ---------------------------------------------------------------------------
# Trivial part
# ---------------------------------------------------------------------------


def kappa_form(base: BaseCategory, Z: GroupHom) -> QuadForm:
    """The form x -> <x + t, Z(x)>."""
    A, t = base.A, base.t
    f = lambda x: A.pairing(A.add(x, t), Z(x))
    basis = A.basis()
    diag = [f(e) for e in basis]
    B = [[f(A.add(e, g)) - f(e) - f(g) for g in basis] for e in basis]
    return QuadForm.from_bilinear_data(A, diag, B)


def kappa_map(base: BaseCategory) -> GroupHom:
    A = base.A
    H, gens = hom_basis(A, A)
    Q, _ = quad_group(A)
    return GroupHom.from_images(H, Q, [quad_coords(kappa_form(base, Z)) for Z in gens])


def kappa_cokernel(base: BaseCategory) -> tuple[FinAbGroup, GroupHom]:
    k = kappa_map(base)
    _, coker = kernel_cokernel(k)
    return canonical_decomposition(coker.group), k


def two_rank(A: FinAbGroup) -> int:
    return sum(1 for n in A.moduli if n % 2 == 0)


def mext_triv_formula(A: FinAbGroup, t) -> FinAbGroup:
    """Z4 x Z2^(r-1) when <t> is a direct summand, Z2^r otherwise (r the 2-rank)."""
    r = two_rank(A)
    mods = (4,) + (2,) * (r - 1) if is_split(A, t) else (2,) * r
    return canonical_decomposition(FinAbGroup(mods))


# ---------------------------------------------------------------------------
# Abelian 2-cocycles with values in the dual group
# ---------------------------------------------------------------------------


def _gcd_matrix(A: FinAbGroup) -> list[list[int]]:
    return [[math.gcd(a, b) for b in A.moduli] for a in A.moduli]


@dataclass(frozen=True)
class AbCocycle2:
    group: FinAbGroup
    m: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        A, g = self.group, _gcd_matrix(self.group)
        rows = tuple(tuple(int(v) % g[i][j] for j, v in enumerate(row)) for i, row in enumerate(self.m))
        if len(rows) != A.rank or any(len(r) != A.rank for r in rows):
            raise ValueError("coefficient matrix has the wrong shape")
        object.__setattr__(self, "m", rows)

    @classmethod
    def zero(cls, A: FinAbGroup) -> "AbCocycle2":
        return cls(A, tuple((0,) * A.rank for _ in range(A.rank)))

    def __call__(self, x, y, z) -> Fraction:
        A = self.group
        x, y, z = A.elt(x), A.elt(y), A.elt(z)
        total = Fraction(0)
        for i, n in enumerate(A.moduli):
            if x[i] + y[i] >= n:
                total += sum(Fraction(self.m[i][j] * z[j], A.moduli[j]) for j in range(A.rank))
        return qz(total)

    def transpose(self) -> "AbCocycle2":
        r = self.group.rank
        return AbCocycle2(self.group, tuple(tuple(self.m[j][i] for j in range(r)) for i in range(r)))

    def is_symmetric(self) -> bool:
        return self == self.transpose()

    def __add__(self, other: "AbCocycle2") -> "AbCocycle2":
        return AbCocycle2(self.group, tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.m, other.m)))

    def table(self) -> tuple[np.ndarray, int]:
        """Numerators ``T[x, y, z]`` of L over the exponent of A."""
        A = self.group
        N = A.exponent
        X = _element_matrix(A)
        size = A.order
        T = np.zeros((size, size, size), dtype=np.int64)
        for i, n in enumerate(A.moduli):
            carry = (X[i][:, None] + X[i][None, :] >= n).astype(np.int64)
            char = sum(self.m[i][j] * (N // A.moduli[j]) * X[j] for j in range(A.rank)) % N if A.rank else 0
            T = (T + carry[:, :, None] * np.asarray(char, dtype=np.int64)[None, None, :]) % N
        return T, N

    def to_json(self) -> dict:
        return {"group": self.group.to_json(), "m": [list(r) for r in self.m]}


def _element_matrix(A: FinAbGroup) -> np.ndarray:
    if A.rank == 0:
        return np.zeros((0, 1), dtype=np.int64)
    return np.indices(A.moduli, dtype=np.int64).reshape(A.rank, -1)


def _addition_table(A: FinAbGroup) -> np.ndarray:
    X = _element_matrix(A)
    idx = np.zeros((A.order, A.order), dtype=np.int64)
    for i, n in enumerate(A.moduli):
        idx = idx * n + (X[i][:, None] + X[i][None, :]) % n
    return idx


def h2ab_group(A: FinAbGroup) -> FinAbGroup:
    """Ext(A, A^) in the carry coordinates: one Z_gcd(n_i, n_j) per ordered pair."""
    g = _gcd_matrix(A)
    return FinAbGroup(tuple(g[i][j] for i in range(A.rank) for j in range(A.rank)))


def cochains(L: AbCocycle2) -> tuple[np.ndarray, int]:
    """Solve L_{x,y}(z) = a_z(x) + a_z(y) - a_z(x + y) for every z.

    Returns ``a[w, x]`` (the cochain for evaluation point w at argument x) as
    numerators over ``N^2`` with ``N`` the exponent of A. Each ``a_z`` is built
    along coordinate paths from its values on generators, which are forced up
    to a character by ``n_i a_z(e_i) = sum_k L_{k e_i, e_i}(z)``.
    """
    A = L.group
    check_size(A.order, 64, "cochain solve group")
    T, N = L.table()
    N2 = N * N
    size = A.order
    X = _element_matrix(A)
    add = _addition_table(A)
    gen_idx = [A.index(e) for e in A.basis()]
    a = np.zeros((size, size), dtype=np.int64)  # a[z, x]
    gen_val = []
    for i, n in enumerate(A.moduli):
        e = gen_idx[i]
        multiples = [A.index(A.scale(k, A.basis()[i])) for k in range(n)]
        s = sum(T[k, e, :] for k in multiples) % N
        gen_val.append(s * (N // n))
    for x in range(1, size):
        p = max(i for i in range(A.rank) if X[i][x])
        prev = A.index(A.sub(tuple(X[:, x]), A.basis()[p]))
        a[:, x] = (a[:, prev] + gen_val[p] - N * T[prev, gen_idx[p], :]) % N2
    lhs = (N * np.transpose(T, (2, 0, 1))) % N2
    rhs = (a[:, :, None] + a[:, None, :] - a[:, add]) % N2
    if not np.array_equal(lhs, rhs):
        raise ArithmeticError("cochain solve failed; the input is not a symmetric cocycle")
    return a, N


def epsilon(L: AbCocycle2, method: str = "auto") -> AbCocycle2:
    """The involution sending an extension of A by A^ to its dual extension."""
    A = L.group
    if method == "transpose" or (method == "auto" and A.order > 64):
        return L.transpose()
    a, N = cochains(L)
    N2 = N * N
    add = _addition_table(A)
    # eps(L)[x, y, z] = a_x(z) + a_y(z) - a_{x+y}(z)
    E = (a[:, None, :] + a[None, :, :] - a[add, :]) % N2
    if np.any(E % N):
        raise ArithmeticError("dual cocycle does not take values in A^")
    E //= N
    g = _gcd_matrix(A)
    rows = []
    for i, n in enumerate(A.moduli):
        e = A.index(A.basis()[i])
        ks = [A.index(A.scale(k, A.basis()[i])) for k in range(n)]
        c = sum(E[k, e, :] for k in ks) % N
        rows.append(tuple(int(c[A.index(A.basis()[j])]) * A.moduli[j] // N % g[i][j] for j in range(A.rank)))
    return AbCocycle2(A, tuple(rows))


# ---------------------------------------------------------------------------
# Pointed part
# ---------------------------------------------------------------------------


def sym2_generators(A: FinAbGroup) -> tuple[FinAbGroup, list[AbCocycle2]]:
    """Symmetric carry matrices: E_ii of order n_i and E_ij + E_ji of order gcd."""
    r, g = A.rank, _gcd_matrix(A)
    mods, gens = [], []
    for i, j in combinations_with_replacement(range(r), 2):
        m = [[0] * r for _ in range(r)]
        m[i][j] = m[j][i] = 1
        mods.append(g[i][j])
        gens.append(AbCocycle2(A, tuple(map(tuple, m))))
    return FinAbGroup(tuple(mods)), gens


def theta(base: BaseCategory, L: AbCocycle2, x) -> Fraction:
    """theta^t_L(x) = L_{x,x}(x + t)."""
    A = base.A
    return L(x, x, A.add(x, base.t))


def theta_map(base: BaseCategory) -> GroupHom:
    """theta^t from Sym^2 into Hom(A_2, Q/Z) = Z_2^s, using the basis (n_i/2) e_i of A_2."""
    A = base.A
    S, gens = sym2_generators(A)
    u = two_torsion(A).gens
    T = FinAbGroup((2,) * len(u))
    return GroupHom.from_images(S, T, [tuple(int(2 * theta(base, L, x)) for x in u) for L in gens])


def theta_kernel(base: BaseCategory) -> tuple[FinAbGroup, GroupHom]:
    th = theta_map(base)
    ker, _ = kernel_cokernel(th)
    return canonical_decomposition(ker.group), th


def theta_is_surjective(base: BaseCategory) -> bool:
    """Image of theta^t equals Hom(A_2 / <t>, Q/Z)."""
    th = theta_map(base)
    s = th.target.rank
    expected = 2 ** (s - 1) if base.super_tannakian else 2**s
    vanish_on_t = all(theta(base, L, base.t) == 0 for L in sym2_generators(base.A)[1])
    return vanish_on_t and th.image().order == expected


# ---------------------------------------------------------------------------
# Cohomology orders
# ---------------------------------------------------------------------------


def h2_group(A: FinAbGroup) -> FinAbGroup:
    return wedge_power(A, 2)


def h3_group(A: FinAbGroup) -> FinAbGroup:
    mods = canonical_decomposition(A).moduli
    parts = list(mods)
    parts += [math.gcd(a, b) for a, b in combinations(mods, 2)]
    parts += [reduce(math.gcd, c) for c in combinations(mods, 3)]
    return canonical_decomposition(FinAbGroup(tuple(parts)))


def cohomology_orders(A: FinAbGroup) -> tuple[int, FinAbGroup, int]:
    return h2_group(A).order, h3_group(A), quad_group(A)[0].order


def kunneth_check(G: FinAbGroup, L: FinAbGroup) -> tuple[bool, dict]:
    ledger = {
        "H3(GxL)": h3_group(direct_sum(G, L)).order,
        "H3(G)": h3_group(G).order,
        "H3(L)": h3_group(L).order,
        "G^(x)L^": tensor(G, L).order,
        "Hom(L,H2(G))": hom_group(L, h2_group(G)).order,
        "Hom(G,H2(L))": hom_group(G, h2_group(L)).order,
    }
    rhs = math.prod(v for k, v in ledger.items() if k != "H3(GxL)")
    ledger["rhs"] = rhs
    return ledger["H3(GxL)"] == rhs, ledger


def pic_group(base: BaseCategory) -> FinAbGroup:
    """Pic(Rep(A, t)) up to the non-canonical identification of the integral part with H^2(A)."""
    h2 = h2_group(base.A)
    if base.super_tannakian and is_split(base.A, base.t):
        return canonical_decomposition(direct_sum(h2, FinAbGroup((2,))))
    return h2


def pic_order(base: BaseCategory) -> tuple[int, int]:
    """(|Pic|, |Pic_int|)."""
    return pic_group(base).order, h2_group(base.A).order


# ---------------------------------------------------------------------------
# Factor report
# ---------------------------------------------------------------------------


@dataclass
class FactorReport:
    triv: FinAbGroup
    pt_over_triv: FinAbGroup
    int_over_pt: FinAbGroup
    top: FinAbGroup
    split: bool
    h3: FinAbGroup | None = None
    order: int = field(init=False)

    def __post_init__(self):
        self.order = math.prod(g.order for g in self.factors)

    @property
    def factors(self) -> list[FinAbGroup]:
        return [self.triv, self.pt_over_triv, self.int_over_pt, self.top]

    @property
    def total_order(self) -> int:
        return self.order

    @property
    def pointed_order(self) -> int:
        return self.triv.order * self.pt_over_triv.order

    def to_json(self) -> dict:
        out = {
            "triv": self.triv.to_json(),
            "pt_over_triv": self.pt_over_triv.to_json(),
            "int_over_pt": self.int_over_pt.to_json(),
            "top": self.top.to_json(),
            "order": self.order,
            "split": self.split,
        }
        if self.h3 is not None:
            out["h3"] = self.h3.to_json()
        return out

    def lines(self) -> list[str]:
        names = ["Mext_triv", "Mext_pt/Mext_triv", "Mext_int/Mext_pt", "Mext/Mext_int"]
        out = [f"{n:<18} {g}" for n, g in zip(names, self.factors)]
        out.append(f"{'order':<18} {self.order}")
        out.append(f"{'split':<18} {str(self.split).lower()}")
        if self.h3 is not None:
            out.append(f"{'H3(A)':<18} {self.h3}")
        return out


def mext_factors(base: BaseCategory) -> FactorReport:
    """Filtration factors; for Tannakian input the same recipe is reported next to H^3(A)."""
    A, t = base.A, base.t
    triv, _ = kappa_cokernel(base)
    pt, _ = theta_kernel(base)
    wedge3 = wedge_power(A, 3)
    if base.super_tannakian:
        split = is_split(A, t)
        top = canonical_decomposition(FinAbGroup((2,) * two_rank(A))) if split else FinAbGroup(())
        return FactorReport(triv, pt, wedge3, top, split)
    return FactorReport(triv, pt, wedge3, FinAbGroup(()), False, h3=h3_group(A))


def total_order(base: BaseCategory) -> int:
    rep = mext_factors(base)
    return rep.h3.order if rep.h3 is not None else rep.order


def twofun_recursion(N: int, A1: FinAbGroup, t1) -> dict:
    """Order ledger for Rep(Z_N) x Rep(A1, t1).

    The complement of Mext(E1) is filtered by H^3(Z_N), Ext(Z_N, Inv(E1)) and
    Hom(Z_N, Pic(E1)); the ledger compares the product with the factor
    orders computed directly for A = Z_N x A1.
    """
    if N < 1:
        raise ValueError("N must be positive")
    e1 = BaseCategory(A1, t1)
    ZN = FinAbGroup((N,))
    whole = BaseCategory(direct_sum(ZN, A1), (0,) + e1.t)
    ledger = {
        "Mext(E)": total_order(whole),
        "Mext(E1)": total_order(e1),
        "H3(Z_N)": N,
        "Ext(Z_N,Inv(E1))": ext_group(ZN, A1).order,
        "Hom(Z_N,Pic(E1))": hom_group(ZN, pic_group(e1)).order,
    }
    ledger["rhs"] = math.prod(v for k, v in ledger.items() if k != "Mext(E)")
    ledger["balanced"] = ledger["rhs"] == ledger["Mext(E)"]
    return ledger


# ---------------------------------------------------------------------------
# Alternating forms and the twisted product
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AltForm2:
    """An alternating form beta; it records mu(x, y) / mu(y, x) for a class mu in H^2(A)."""

    form: BilForm

    def __post_init__(self):
        if not self.form.is_alternating():
            raise ValueError("form is not alternating")

    @property
    def group(self) -> FinAbGroup:
        return self.form.group

    @classmethod
    def zero(cls, A: FinAbGroup) -> "AltForm2":
        return cls(BilForm(A, tuple((0,) * A.rank for _ in range(A.rank))))

    @classmethod
    def from_upper(cls, A: FinAbGroup, values: dict[tuple[int, int], Fraction]) -> "AltForm2":
        M = [[Fraction(0)] * A.rank for _ in range(A.rank)]
        for (i, j), v in values.items():
            M[i][j], M[j][i] = qz(v), qz(-v)
        return cls(BilForm(A, tuple(map(tuple, M))))

    def __call__(self, x, y) -> Fraction:
        return self.form(x, y)

    def __eq__(self, other) -> bool:
        return isinstance(other, AltForm2) and self.form == other.form

    def __hash__(self):
        return hash(self.form)

    def to_json(self) -> dict:
        return self.form.to_json()


def wedge2_generators(A: FinAbGroup) -> tuple[FinAbGroup, list[AltForm2]]:
    mods, gens = [], []
    for i, j in combinations(range(A.rank), 2):
        g = math.gcd(A.moduli[i], A.moduli[j])
        mods.append(g)
        gens.append(AltForm2.from_upper(A, {(i, j): Fraction(1, g)}))
    return FinAbGroup(tuple(mods)), gens


def xi(beta: AltForm2, base: BaseCategory, x) -> int:
    return int(2 * beta(x, base.t)) % 2


def h2t_star(b1: AltForm2, b2: AltForm2, base: BaseCategory) -> AltForm2:
    A = base.A
    basis = A.basis()
    x1 = [xi(b1, base, e) for e in basis]
    x2 = [xi(b2, base, e) for e in basis]
    M = [[b1.form.matrix[i][j] + b2.form.matrix[i][j] + Fraction(x1[i] * x2[j] - x1[j] * x2[i], 2)
          for j in range(A.rank)] for i in range(A.rank)]
    return AltForm2(BilForm(A, tuple(map(tuple, M))))


def star_power(beta: AltForm2, n: int, base: BaseCategory) -> AltForm2:
    out = AltForm2.zero(base.A)
    for _ in range(n):
        out = h2t_star(out, beta, base)
    return out


def Q_E(beta: AltForm2, base: BaseCategory, z) -> tuple[Fraction, ...]:
    """The character y -> beta(z + (xi(beta, z) + 1) t, y), as its values on generators."""
    A = base.A
    w = A.add(A.elt(z), A.scale(xi(beta, base, z) + 1, base.t))
    return tuple(beta(w, e) for e in A.basis())


# ---------------------------------------------------------------------------
# Cup squares for elementary abelian 2-groups
# ---------------------------------------------------------------------------


def _monomials(r: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of degree-d monomials in r variables, lexicographic."""
    out = []
    for c in combinations_with_replacement(range(r), d):
        e = [0] * r
        for i in c:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out, reverse=True)


def _gf2_kernel(rows: list[int], ncols: int) -> list[int]:
    """Kernel basis (as bitmasks over columns) of the F2 matrix whose columns are ``rows``.

    ``rows[j]`` is the image of basis vector j, encoded as a bitmask.
    """
    pivots: dict[int, tuple[int, int]] = {}
    kernel = []
    for j, v in enumerate(rows):
        combo = 1 << j
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = (v, combo)
                break
            pv, pc = pivots[top]
            v ^= pv
            combo ^= pc
        else:
            kernel.append(combo)
    return kernel


def _apply(op, basis_in, basis_out) -> list[int]:
    where = {m: k for k, m in enumerate(basis_out)}
    cols = []
    for m in basis_in:
        mask = 0
        for term in op(m):
            mask ^= 1 << where[term]
        cols.append(mask)
    return cols


def _square(m):
    return [tuple(2 * e for e in m)]


def _sq1(m):
    # Sq^1 is the derivation with Sq^1 x_i = x_i^2; over F2 the coefficient of x_i is e_i mod 2
    out = []
    for i, e in enumerate(m):
        if e % 2:
            out.append(tuple(v + (k == i) for k, v in enumerate(m)))
    return out


def _check_r(r: int) -> None:
    if not 1 <= r <= 6:
        raise ValueError("r must be between 1 and 6")


def cup_square_kernel(r: int) -> tuple[int, list[tuple[tuple[int, ...], ...]]]:
    """Kernel of a -> a^2 on H^2(Z_2^r, Z_2) = degree-2 part of F2[x_1..x_r]."""
    _check_r(r)
    h2, h4 = _monomials(r, 2), _monomials(r, 4)
    ker = _gf2_kernel(_apply(_square, h2, h4), len(h2))
    return len(ker), [tuple(h2[k] for k in range(len(h2)) if mask >> k & 1) for mask in ker]


def obstruction_kernel(r: int) -> tuple[int, int]:
    """(dim Ker(delta), dim H^2) for delta = iota o cup-square on H^2(Z_2^r, Z_2).

    The coefficient map Z2 -> k^x kills exactly the image of integral classes,
    which for elementary abelian 2-groups is the kernel of Sq^1 in degree 4.
    So Ker(delta) = {a : Sq^1(a^2) = 0}.
    """
    _check_r(r)
    h2, h5 = _monomials(r, 2), _monomials(r, 5)
    composite = lambda m: [w for s in _square(m) for w in _sq1(s)]
    ker = _gf2_kernel(_apply(composite, h2, h5), len(h2))
    return len(ker), len(h2)

"""End-to-end checks grouped into suites, used by ``mext verify``."""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterator

from .abelian import FinAbGroup, Z
from .extensions import (
    build_M1_i,
    build_M2_xi,
    build_M_k_zeta,
    charge_and_w,
    cyclic_fermionic,
    enumerate_pointed,
    equivalent,
    multiplication_table,
    order_census,
    order_in_mext,
    power,
    svect,
    z2_z2f,
)
from .filtration import kunneth_check, mext_factors, twofun_recursion


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.suite}/{self.name}  {self.detail}"

    def to_json(self) -> dict:
        return {"suite": self.suite, "name": self.name, "passed": self.passed, "detail": self.detail}


def _run(suite: str, name: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed check, reported with its message
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(suite, name, bool(ok), detail, time.perf_counter() - start)


def is_cyclic_table(table: list[list[int]]) -> bool:
    n = len(table)
    for g in range(n):
        seen, x = set(), g
        for _ in range(n):
            seen.add(x)
            x = table[x][g]
        if len(seen) == n:
            return True
    return False


def census_of(mods: tuple[int, ...]) -> dict[int, int]:
    from .qforms import _order_table
    from collections import Counter

    return dict(sorted(Counter(_order_table(FinAbGroup(mods)).tolist()).items()))


def suite_svect() -> Iterator[Check]:
    b = svect()
    yield _run("svect", "factor-order", lambda: (mext_factors(b).order == 16, f"order {mext_factors(b).order}"))
    reps = enumerate_pointed(b)
    yield _run("svect", "class-count", lambda: (len(reps) == 8, f"{len(reps)} classes"))

    def cyclic():
        table = multiplication_table(reps)
        return is_cyclic_table(table), "multiplication table is cyclic of order 8"

    yield _run("svect", "cyclic-z8", cyclic)

    def charges():
        ks = [charge_and_w(M)[0] for M in reps]
        return sorted(ks) == list(range(0, 16, 2)) and len(set(ks)) == len(ks), f"k16 = {sorted(ks)}"

    yield _run("svect", "charges", charges)


def suite_z2n() -> Iterator[Check]:
    for n in (2, 3):
        b = cyclic_fermionic(n)
        yield _run("z2n", f"n={n}/factor-order",
                   lambda b=b, n=n: (mext_factors(b).order == 2 ** (n + 1), f"order {mext_factors(b).order}"))
        yield _run("z2n", f"n={n}/generator-order",
                   lambda n=n: (order_in_mext(build_M_k_zeta(n, 0, 1)) == 2 ** (n + 1),
                                f"order {order_in_mext(build_M_k_zeta(n, 0, 1))}"))

        def squares(n=n):
            ok = all(equivalent(power(build_M_k_zeta(n, k, z), 2), build_M_k_zeta(n, k + 1, z)) is not None
                     for k in range(n) for z in (1, 3))
            return ok, f"M_(k,zeta)^2 = M_(k+1,zeta^2) for k < {n}"

        yield _run("z2n", f"n={n}/square-law", squares)


def suite_z2z2() -> Iterator[Check]:
    b = z2_z2f()

    def factors():
        rep = mext_factors(b)
        got = [g.moduli for g in rep.factors]
        want = [(2, 4), (2, 2), (), (2, 2)]
        return got == want and rep.order == 128, f"{[str(g) for g in rep.factors]} order {rep.order}"

    yield _run("z2z2", "factors", factors)
    reps = enumerate_pointed(b)
    yield _run("z2z2", "class-count", lambda: (len(reps) == 32, f"{len(reps)} classes"))

    def structure():
        census = order_census(reps)
        return census == census_of((8, 4)), f"element orders {census}, matching Z8 x Z4"

    yield _run("z2z2", "group-z8xz4", structure)
    M2 = build_M2_xi(1)
    yield _run("z2z2", "M2-order", lambda: (order_in_mext(M2) == 4, f"order {order_in_mext(M2)}"))
    yield _run("z2z2", "M1-square",
               lambda: (equivalent(build_M1_i(1), power(M2, 2)) is not None, "M1(i) = M2(xi)^2"))

    def pm():
        same = {x: equivalent(M2, build_M2_xi(x)) is not None for x in (1, 3, 5, 7)}
        return same == {1: True, 3: False, 5: True, 7: False}, f"M2(xi) = M2(xi^x): {same}"

    yield _run("z2z2", "pm-xi", pm)


KUNNETH_PAIRS = [((2,), (2,)), ((2,), (4,)), ((4,), (4,)), ((2, 2), (2,))]


def suite_kunneth() -> Iterator[Check]:
    for g, l in KUNNETH_PAIRS:
        def one(g=g, l=l):
            ok, ledger = kunneth_check(Z(*g), Z(*l))
            return ok, f"{ledger['H3(GxL)']} = {ledger['rhs']}"

        yield _run("kunneth", f"{g}x{l}", one)

    def rec():
        led = twofun_recursion(2, Z(2), (1,))
        parts = [led[k] for k in ("Mext(E1)", "H3(Z_N)", "Ext(Z_N,Inv(E1))", "Hom(Z_N,Pic(E1))")]
        return led["balanced"] and led["Mext(E)"] == 128 and parts == [16, 2, 2, 2], \
            f"{led['Mext(E)']} = {' x '.join(map(str, parts))}"

    yield _run("kunneth", "recursion-z2-svect", rec)


SUITES = {"svect": suite_svect, "z2n": suite_z2n, "z2z2": suite_z2z2, "kunneth": suite_kunneth}


def run(suite: str = "all") -> list[Check]:
    names = list(SUITES) if suite == "all" else [suite]
    out = []
    for name in names:
        out.extend(SUITES[name]())
    return out

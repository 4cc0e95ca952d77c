"""The pointed part of Mext(Rep(Z2 x Z2^f)).

Builds the two Drinfeld-center families, checks M1(i) against the square of
M2(xi), and tabulates element orders over all 32 pointed classes.

Run: python demos/z2_times_fermion.py   (about 20 seconds)
"""
from mext.extensions import (
    build_M1_i,
    build_M2_xi,
    charge_and_w,
    charge_label,
    enumerate_pointed,
    equivalent,
    order_census,
    order_in_mext,
    power,
    z2_z2f,
)
from mext.filtration import mext_factors


def main() -> None:
    base = z2_z2f()
    rep = mext_factors(base)
    print(f"{base}: |Mext| = {rep.order}, factors {[str(g) for g in rep.factors]}")

    M2 = build_M2_xi(1)
    print(f"M2(xi): C = {M2.C}, order {order_in_mext(M2)}, charge {charge_label(charge_and_w(M2)[0])}")
    for x in (3, 5, 7):
        same = equivalent(M2, build_M2_xi(x)) is not None
        print(f"  M2(xi^{x}) equivalent to M2(xi): {same}")
    print(f"M1(i) equivalent to M2(xi)^2: {equivalent(build_M1_i(1), power(M2, 2)) is not None}")

    reps = enumerate_pointed(base)
    print(f"\n{len(reps)} pointed classes, element orders {order_census(reps)}")


if __name__ == "__main__":
    main()

"""Condensing an isotropic subgroup and watching the Gauss sum.

Run: python demos/condensation.py
"""
from fractions import Fraction

from mext.abelian import Z
from mext.qforms import MetricGroup, QuadForm, central_charge, condense, gauss_sum


def show(label: str, m: MetricGroup) -> None:
    sigma, _ = gauss_sum(m)
    print(f"{label:<10} {str(m.group):<10} sigma = {sigma.real:+.3f}{sigma.imag:+.3f}i  "
          f"charge {central_charge(m)}/8")


def main() -> None:
    # two copies of Z4 with opposite forms: the diagonal is isotropic
    m = MetricGroup.of(QuadForm(Z(4, 4), (Fraction(1, 8), Fraction(7, 8))))
    show("parent", m)
    for h in [(1, 1), (2, 2)]:
        c = condense(m, [h])
        show(f"/<{h}>", c.quotient)
        print(f"{'':<10} lifts of the quotient generators: {c.lifts}")

    m = MetricGroup.of(QuadForm(Z(8), (Fraction(1, 16),)))
    show("parent", m)
    print("  values:", sorted({str(m.q(x)) for x in m.group.elements()}))
    print("  no nonzero isotropic element, so nothing to condense")


if __name__ == "__main__":
    main()

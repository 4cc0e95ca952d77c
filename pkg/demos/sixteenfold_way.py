"""Pointed minimal extensions of sVect and their central charges.

Run: python demos/sixteenfold_way.py
"""
from mext.extensions import charge_and_w, charge_label, enumerate_pointed, multiplication_table, svect
from mext.filtration import mext_factors


def main() -> None:
    base = svect()
    report = mext_factors(base)
    print(f"{base}: filtration factors")
    for line in report.lines():
        print("  " + line)

    reps = enumerate_pointed(base)
    print(f"\n{len(reps)} pointed classes")
    for i, M in enumerate(reps):
        k16, _ = charge_and_w(M)
        diag = ", ".join(M.cat.form.to_json()["diag"])
        print(f"  [{i}] charge {charge_label(k16):>5}  C = {M.C}  q on generators: {diag}")

    table = multiplication_table(reps)
    print("\nproduct table (indices into the list above)")
    for row in table:
        print("  " + " ".join(str(j) for j in row))


if __name__ == "__main__":
    main()

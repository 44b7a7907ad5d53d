"""Smoke test for the Python bindings: python python/smoke_test.py"""

from fractions import Fraction

import rayzeta


def main():
    k = rayzeta.Field(3)
    assert k.minus_cf == [4], k.minus_cf
    table = k.zeta_table(2)
    assert table == {(0, 1): Fraction(1, 6), (1, 0): Fraction(1, 6)}, table
    assert k.partial_zeta0(2, 1, 0) == Fraction(1, 6)
    assert k.orbit(2, 1, 0) == [(1, 0), (0, 1)]

    # 5 is inert in Q(√3), so the trivial character gives zero.
    assert k.hecke_l0(rayzeta.Character(5)) == {}

    fam = rayzeta.Family(preset="rd-n2p2")
    assert fam.degree == 1
    assert fam.field(4) is None
    assert fam.field(1).radicand == 3
    rows = fam.report(2)
    assert len(rows) == 4
    assert all(r["oracle"] == "ok" and r["bounds_ok"] for r in rows)
    by_label = {(r["r"], r["label"]): r["k_form"] for r in rows}
    assert by_label[(1, (1, 0))] == [Fraction(1, 6), Fraction(1, 3)]

    chi = rayzeta.Character(5, 4, [(2, 1)])
    lvals = fam.hecke_l0(chi)
    assert sorted(lvals) == [0, 1, 2, 3, 4]

    try:
        rayzeta.Character(5, 2, [(2, 1), (3, 0)])
    except ValueError:
        pass
    else:
        raise AssertionError("non-multiplicative table accepted")

    bad = rayzeta.Family(f_poly="x^4/4+x^3/2+3x^2/4+x/2", a_polys=["x^2+x", "2"], n_min=2)
    try:
        bad.report(2)
    except rayzeta.HypothesisError:
        pass
    else:
        raise AssertionError("non-invariant family accepted")

    [a5] = rayzeta.run_verify("A5", qs=[2])
    assert a5["passed"], a5

    print("smoke test ok")


if __name__ == "__main__":
    main()

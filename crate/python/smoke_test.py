"""Quick end-to-end check of the Python bindings."""

import math

import pintersect as pi


def main():
    h = pi.Poly([-1, 0, 1])
    assert h.degree == 2 and h.coeffs == ["-1", "0", "1"]
    assert pi.Poly.from_json(h.to_json()).coeffs == h.coeffs

    verdict = pi.certify(pi.Poly([0, -1, 1]), 1000)
    assert verdict["kind"] == "SufficientCondition", verdict
    assert pi.certify(pi.Poly([0, 0, 1]), 100)["kind"] == "FailsAt"

    aux = pi.Aux(h)
    assert aux.data(5)["h_d"] == ["3", "-8", "5"]
    assert aux.gauss(1, 1, 3) == complex(2.0, 0.0)
    rows = aux.gauss_all(1, 7)
    assert len(rows) == 6 and all(abs(r["abs"] - math.sqrt(8)) < 1e-12 for r in rows)

    assert abs(pi.psi(20, 1, 4) - 7.0076) < 1e-4

    b = pi.IndexSet(100, [1, 4, 9, 12])
    r_direct = aux.count(b, 1, 10, "direct")
    assert abs(r_direct - (2 * math.log(2) + 2 * math.log(3))) < 1e-9
    assert abs(aux.count(b, 1, 10) - r_direct) < 1e-9

    z, psi_total = aux.weyl(1, 100_000, 0.0)
    assert abs(z.real - psi_total) < 1e-9 * psi_total

    sixes = pi.IndexSet(3000, list(range(6, 3001, 6)))
    trace = pi.iterate(sixes, pi.Poly([0, -1, 1]))
    assert trace["outcome"] in {
        "StructureFound", "DensitySaturated", "StepBudgetExhausted", "LengthFloor", "NoIncrement",
    }

    greedy = pi.IndexSet.greedy(pi.Poly([0, -1, 1]), 1000)
    assert 0 < greedy.density < 1 and len(greedy) == len(greedy.members)

    print("smoke test passed")


if __name__ == "__main__":
    main()

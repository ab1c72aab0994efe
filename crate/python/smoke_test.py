"""Smoke test for the projrk_py extension module.

Build and install first:
    cd crates/py && maturin build --release -o /tmp/wheels
    pip install /tmp/wheels/projrk_py-*.whl
then run `python3 python/smoke_test.py`.
"""

import math

import projrk_py as pr


def check(cond, what):
    if not cond:
        raise SystemExit(f"FAIL {what}")
    print(f"ok   {what}")


def main():
    lf = pr.Tableau.midpoint("leapfrog2")
    check(lf.b == ["1/4", "1/2", "1/4"], "leapfrog midpoint weights")
    check(lf.is_explicit() and not lf.is_symplectic(), "midpoint tableau is explicit, not symplectic")

    report = lf.analyze(6)
    check(report["classical_order"] == 2, "classical order 2")
    check(report["pseudosymplectic_order"] == 5, "pseudosymplectic order 5")
    census = [(r["conditions"], r["satisfied"]) for r in report["census"]]
    check(census == [(1, 1), (1, 1), (1, 1), (3, 3), (6, 6), (16, 13)], "condition census")

    mono = pr.Tableau.monoimplicit("leapfrog2")
    check(mono == pr.Tableau.symmetric("leapfrog2"), "closed form equals elimination")
    check(mono.a[0] == ["1/8", "-1/4", "1/8"], "monoimplicit first row")
    check(mono.is_symplectic(), "monoimplicit tableau is symplectic")
    check(pr.Tableau.from_json(mono.to_json()) == mono, "JSON round trip")

    tj = pr.Tableau.midpoint("triplejump4")
    check(tj.stages == 7 and tj.analyze(5)["classical_order"] == 4, "triple jump: 7 stages, order 4")
    check(pr.Tableau.midpoint(alphas=["1/5", "1/2", "3/10"]).stages == 7, "rational substeps")

    check(pr.tree_counts(6) == [1, 1, 2, 4, 9, 20], "tree counts")
    check(pr.condition_counts(6) == [1, 1, 1, 3, 6, 16], "condition counts")

    z0 = [0.5, 0.0]
    direct = pr.Stepper("symmetric").step("nonseparable", z0, 0.1)
    tableau = pr.Stepper.from_tableau(mono).step("nonseparable", z0, 0.1)
    check(max(abs(a - b) for a, b in zip(direct, tableau)) < 1e-12, "symmetric projection equals its tableau")

    mp = pr.Stepper("midpoint", "leapfrog2", precision=128)
    check(mp.precision == 128 and mp.kind == "midpoint-extended", "multiprecision stepper")
    traj = mp.integrate("kepler", 0.05, 20, stride=5)
    check(len(traj["times"]) == 5 and math.isfinite(traj["energy_error"][-1]), "kepler trajectory")

    scan = pr.Stepper("midpoint").defect_scan("nonseparable", [0.2, 0.1, 0.05, 0.025], z0)
    check(abs(scan["slope"] - 6) < 0.5, f"defect slope {scan['slope']:.3f}")

    fit = pr.Stepper("midpoint").drift("nonseparable", [0.2, 0.14, 0.1], 500.0, z0)
    check(abs(fit["slope"] - 5) < 0.6, f"drift slope {fit['slope']:.3f}")

    try:
        pr.Stepper("midpoint", "rk9")
    except ValueError:
        check(True, "unknown scheme rejected")
    else:
        check(False, "unknown scheme rejected")

    exact = pr.verify_paper(skip_numeric=True)
    check(exact["passed"], f"{len(exact['checks'])} exact reproduction checks")
    print("all smoke checks passed")


if __name__ == "__main__":
    main()

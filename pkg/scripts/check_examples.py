"""
Re-derive the published numbers of the worked examples and report each one.
Usage: python -m scripts.check_examples
"""
import sys

import numpy as np

from phaseforge import equiv, phtype, scenarios, xform


def check(label: str, value: float, expected: float, tol: float) -> bool:
    ok = abs(value - expected) <= tol
    mark = "✅" if ok else "❌"
    print(f"   {mark} {label}: {value:.10g} (expected {expected:.10g} ± {tol:.0e})")
    return ok


def check_examples() -> bool:
    """Run every check; True when all pass."""
    results = []

    print("1. Continuous example...")
    r = scenarios.continuous_example()
    tr = xform.cont_to_cph(r)
    unit = tr.similarity.nu / np.linalg.norm(tr.similarity.nu)
    for i, expected in enumerate([0.5222330, 0.6963106, 0.3481553, 0.3481553], start=1):
        results.append(check(f"nu[{i}]", unit[i - 1], expected, 1e-6))
    results.append(check("psi", tr.psi, 1.5, 1e-12))
    results.append(check("T~[1,2]", tr.T[0, 1], 4.0 / 3.0, 1e-9))
    report = equiv.verify_equivalence(r, tr, 50.0, np.arange(101) * 0.1)
    results.append(check("max |y - y_PH|", report.max_abs_err, 0.0, report.tolerance))

    print("\n2. Student dynamics...")
    r = scenarios.build_scenario("student")
    tr = xform.disc_to_dph(r)
    raw = xform.raw_ph(tr)
    results.append(check("psi", tr.psi, 0.6905371, 1e-7))
    results.append(check("f*(3)", phtype.dph_pmf(tr.ph, 3), 0.6256, 1e-10))
    results.append(check("f(0) point mass", phtype.dph_pmf(raw, 0), 0.309463, 1e-6))
    results.append(check("f(3)", phtype.dph_pmf(raw, 3), 0.432, 1e-6))
    results.append(check("mean", phtype.ph_mean(tr.ph), 1 / 0.92 + 1 / 0.85 + 1 / 0.8, 1e-10))
    report = equiv.verify_equivalence(r, tr, 50.0, np.arange(11))
    results.append(check("max |y - y_PH|", report.max_abs_err, 0.0, report.tolerance))

    print("\n3. Supply chain...")
    r = scenarios.build_scenario("supply-chain")
    tr = xform.disc_to_dph(r)
    results.append(check("alpha~[3]", tr.alpha_raw[2], 0.7231638, 1e-7))
    results.append(check("T~[2,1]", tr.T[1, 0], 0.8329412, 1e-6))
    results.append(check("f*(3)", phtype.dph_pmf(tr.ph, 3), 0.531, 5e-4))
    results.append(check("mean", phtype.ph_mean(tr.ph), 3.77690, 1e-4))
    report = equiv.verify_equivalence(r, tr, 100.0, np.arange(14))
    results.append(check("max |y - y_PH|", report.max_abs_err, 0.0, report.tolerance))

    passed = sum(results)
    print("\n" + "=" * 50)
    print(f"Checks passed: {passed}/{len(results)}")
    return passed == len(results)


if __name__ == "__main__":
    sys.exit(0 if check_examples() else 1)

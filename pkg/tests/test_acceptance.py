"""Acceptance criteria AC1-AC10, one check per criterion.

Run directly for a one-line-per-criterion report:

    python3 tests/test_acceptance.py
"""
import json
import subprocess
import sys
import time

import jsonschema
import numpy as np
import pytest

from kkcs.chern_simons import (
    adiabatic_sweep,
    cs_direct,
    cs_reduced,
    fit_linear_quadratic,
    integrate_chart,
    stokes_density,
)
from kkcs.presets import PresetSpec, build_preset
from kkcs.records import RUN_RECORD_SCHEMA
from kkcs.suites import run_suite

PI = np.pi
SEED = 2024
N_SAMPLES = 100
N_TORI = 20


def _report(tag, passed, detail):
    line = f"{tag} {'PASS' if passed else 'FAIL'}  {detail}"
    print(line)
    return passed, line


def check_ac1():
    t0 = time.perf_counter()
    res = run_suite("christoffel", PresetSpec("torus-random", seed=SEED), points=N_SAMPLES)
    dt = time.perf_counter() - t0
    dev = res.checks[0].value
    return _report("AC1", dev <= 1e-8 and dt < 1.0,
                   f"christoffel closed vs generic: max dev {dev:.2e} (tol 1e-8), {dt:.2f} s (< 1 s)")


def check_ac2():
    t0 = time.perf_counter()
    spin = run_suite("spin", PresetSpec("torus-random", seed=SEED), points=N_SAMPLES)
    red = run_suite("reduce", PresetSpec("torus-random", seed=SEED), points=N_SAMPLES)
    dt = time.perf_counter() - t0
    d_spin = next(c.value for c in spin.checks if c.name == "spin_closed_vs_generic")
    d_red = next(c.value for c in red.checks if c.name == "reduced_closed_vs_generic")
    ok = d_spin <= 1e-8 and d_red <= 1e-8 and dt < 1.0
    return _report("AC2", ok, f"spin dev {d_spin:.2e}, reduced dev {d_red:.2e} (tol 1e-8), {dt:.2f} s (< 1 s)")


def check_ac3():
    worst = {"spin_antisymmetry": 0.0, "vielbein_dual": 0.0, "vielbein_metric": 0.0}
    for name in ("torus-random", "hopf"):
        res = run_suite("spin", PresetSpec(name, seed=SEED), points=N_SAMPLES)
        for c in res.checks:
            if c.name in worst:
                worst[c.name] = max(worst[c.name], c.value)
    ok = worst["spin_antisymmetry"] <= 1e-9 and worst["vielbein_dual"] <= 1e-12 and worst["vielbein_metric"] <= 1e-12
    return _report("AC3", ok, "antisymmetry {spin_antisymmetry:.1e} (1e-9), E.Einv-I {vielbein_dual:.1e} (1e-12), "
                   "E^T E-G {vielbein_metric:.1e} (1e-12)".format(**worst))


def check_ac4():
    t0 = time.perf_counter()
    specs = [PresetSpec("hopf")] + [PresetSpec("torus-random", seed=SEED + i) for i in range(N_TORI)]
    n_ok, worst_ratio, worst_err = 0, 0.0, 0.0
    for spec in specs:
        kk, dom, quad = build_preset(spec)
        r = cs_reduced(kk, dom, quad)
        err = r.quadrature_error_estimate
        worst_err = max(worst_err, err)
        ratio = abs(r.cs_direct - r.cs_reduced) / err
        worst_ratio = max(worst_ratio, ratio)
        n_ok += ratio <= 3 and err <= 1e-6
    dt = time.perf_counter() - t0
    ok = n_ok == len(specs) and dt < 10.0
    return _report("AC4", ok, f"|direct - reduced| <= 3 err on {n_ok}/{len(specs)} datasets "
                   f"(worst ratio {worst_ratio:.1e}), max err {worst_err:.1e} (1e-6), {dt:.1f} s (< 10 s)")


def check_ac5():
    kk, dom, quad = build_preset(PresetSpec("hopf"))
    r = cs_reduced(kk, dom, quad)
    d_cs = abs(r.cs_reduced - (4 * PI + PI / 2))
    d_tl = abs(r.term_linear - 4 * PI)
    return _report("AC5", d_cs <= 1e-6 and d_tl <= 1e-7,
                   f"cs_reduced - (4pi + pi/2) = {d_cs:.1e} (1e-6), term_linear - 4pi = {d_tl:.1e} (1e-7)")


def check_ac6():
    kk, dom, quad = build_preset(PresetSpec("hopf"))
    sw = adiabatic_sweep(kk, [1, 0.5, 0.25, 0.1, 0.01, 1e-4], dom, quad)
    ra = abs(sw.fit.a / (4 * PI) - 1)
    rb = abs(sw.fit.b / (PI / 2) - 1)
    lim = sw.limit["cs_reduced"]
    ok = ra <= 1e-5 and rb <= 1e-5 and abs(lim) <= 1.3e-3
    return _report("AC6", ok, f"a rel {ra:.1e}, b rel {rb:.1e} (1e-5), CS(1e-4) = {lim:.4e} (<= 1.3e-3)")


def check_ac7():
    kk, dom, quad = build_preset(PresetSpec("torus-random", seed=SEED))
    eps = [1.0, 0.5, 0.2, 0.05]
    direct = [cs_direct(kk.with_epsilon(e), dom, quad) for e in eps]
    reduced = [cs_reduced(kk.with_epsilon(e), dom, quad).cs_reduced for e in eps]
    rd = fit_linear_quadratic(eps, direct).residual
    rr = fit_linear_quadratic(eps, reduced).residual
    return _report("AC7", rd <= 1e-9 and rr <= 1e-9, f"relative fit residual direct {rd:.1e}, reduced {rr:.1e} (1e-9)")


def check_ac8():
    worst = 0.0
    for i in range(5):
        kk, dom, quad = build_preset(PresetSpec("torus-random", seed=SEED + i))
        worst = max(worst, abs(integrate_chart(lambda x: stokes_density(kk, x), dom, quad).value))
    return _report("AC8", worst <= 1e-10, f"max |int exact term| over 5 periodic datasets {worst:.1e} (1e-10)")


def check_ac9():
    kk, dom, quad = build_preset(PresetSpec("hopf"))
    lens, _, _ = build_preset(PresetSpec("lens", lens_order=2))
    a, b = cs_direct(kk, dom, quad), cs_direct(lens, dom, quad)
    rel = abs(b - a / 2) / abs(a / 2)
    return _report("AC9", rel <= 1e-10, f"cs_direct(lens 2) vs hopf/2 relative {rel:.1e} (1e-10)")


def _cli(*args):
    return subprocess.run([sys.executable, "-m", "kkcs.cli", *args], capture_output=True, text=True)


def check_ac10():
    run = _cli("verify", "--suite", "cs", "--geometry", "hopf")
    try:
        jsonschema.validate(json.loads(run.stdout), RUN_RECORD_SCHEMA)
        valid = True
    except (ValueError, jsonschema.ValidationError):
        valid = False
    bad = _cli("verify", "--suite", "christoffel", "--geometry", "hopf", "--tolerance", "1e-300")
    ok = run.returncode == 0 and valid and bad.returncode == 1
    return _report("AC10", ok, f"verify cs hopf exit {run.returncode} (want 0), schema-valid JSON {valid}, "
                   f"corrupted tolerance exit {bad.returncode} (want 1)")


CHECKS = [check_ac1, check_ac2, check_ac3, check_ac4, check_ac5, check_ac6, check_ac7, check_ac8, check_ac9,
          check_ac10]


@pytest.mark.parametrize("check", CHECKS, ids=[f"AC{i}" for i in range(1, 11)])
def test_acceptance(check):
    passed, line = check()
    assert passed, line


if __name__ == "__main__":
    results = [c()[0] for c in CHECKS]
    print(f"{sum(results)}/{len(results)} criteria pass")
    sys.exit(0 if all(results) else 1)

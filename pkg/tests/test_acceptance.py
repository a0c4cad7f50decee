"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here; the conftest summary repeats the verdicts.
"""

import itertools
import time
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from memgrid.cli import main
from memgrid.device_model import BoundaryTrajectory, DeviceParams, boundary_velocity_trace, vca_residual, wave_velocity_check
from memgrid.element_table import BUILTIN_CANDIDATES, ViolationKind as V, canonical_table, evaluate, memristor_rejection_report
from memgrid.impedance import decompose_arrays, dynamic_reactance_pair, dynamic_resistance_pair
from memgrid import kernels
from memgrid.simulator import DriveSignal, SimConfig, detect_ndr, detect_pinch, energy_audit, ideal_memristor_current, loop_area, run

CANCEL_TOL = 1e-9
SWEEP_SECONDS = 1.0
VCA_RATIO = (3.5, 4.5)
VCA_FINE = 1e-4
VELOCITY_TOL = 1e-6
AREA_FROZEN = 1e-12
SIM_SECONDS = 5.0
PLATEAU_CV = 0.10
ENDPOINT_FRACTION = 0.10
GROWTH_TOL = 1e-6


def report(number, ok, detail):
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def _decade_sweep():
    """10 017 points: 27 parameter corners (default +-one decade) x 371 (phi, n_b) samples."""
    rng = np.random.default_rng(20240611)
    phi = rng.uniform(-2, 2, 371)
    phi[phi == 0] = 1e-3
    n_b = rng.uniform(0.05, 0.95, 371)
    base = DeviceParams()
    out = []
    for fp, fa, ff in itertools.product((0.1, 1.0, 10.0), repeat=3):
        params = base.replace(p=base.p * fp, alpha=base.alpha * fa, f0=base.f0 * ff)
        z1, z2, status = decompose_arrays(phi, n_b, params)
        out.append((params, phi, n_b, z1, z2, status))
    return out


@pytest.fixture(scope="module")
def sweep():
    start = time.perf_counter()
    data = _decade_sweep()
    return data, time.perf_counter() - start


@pytest.fixture(scope="module")
def default_trace():
    start = time.perf_counter()
    trace = run(DriveSignal(), DeviceParams(), SimConfig())
    return trace, time.perf_counter() - start


@pytest.mark.criterion(1, "reactive cancellation, max |im Z1 + im Z2| / max(1, |im Z1|) < 1e-9 over 1e4 points in < 1 s")
def test_criterion_01_reactive_cancellation(sweep):
    data, elapsed = sweep
    worst = max(float(np.max(np.abs(z1.imag + z2.imag) / np.maximum(1.0, np.abs(z1.imag)))) for _, _, _, z1, z2, _ in data)
    points = sum(len(d[1]) for d in data)
    ok = points >= 10_000 and worst < CANCEL_TOL and elapsed < SWEEP_SECONDS
    assert report(1, ok, f"points={points} worst={worst:.2e} time={elapsed:.3f}s")


@pytest.mark.criterion(2, "composite positivity, min re(Z1 + Z2) > 0 over the same sweep")
def test_criterion_02_positivity(sweep):
    data, _ = sweep
    lowest = min(float(np.min((z1 + z2).real)) for _, _, _, z1, z2, _ in data)
    assert report(2, lowest > 0, f"min re(Z1+Z2)={lowest:.6g}")


@pytest.mark.criterion(3, "non-dominant negative component exists (anomaly-free) and matches the mpmath fixture")
def test_criterion_03_negative_component(sweep, fixture_json):
    data, _ = sweep
    found = 0
    for _, _, _, z1, z2, status in data:
        r1, r2 = z1.real, z2.real
        ok = (status & kernels.ANOMALY) == 0
        neg = np.minimum(r1, r2)
        found += int(np.count_nonzero(ok & (neg < 0) & (np.abs(neg) < np.maximum(r1, r2))))
    fx = fixture_json("negative_component_point.json")
    z1, z2, status = decompose_arrays([fx["phi"]], [fx["n_b"]], DeviceParams(**fx["params"]))
    want1 = complex(float(fx["z1"][0]), float(fx["z1"][1]))
    want2 = complex(float(fx["z2"][0]), float(fx["z2"][1]))
    match = abs(z1[0] - want1) < 1e-12 and abs(z2[0] - want2) < 1e-12
    non_dominant = z2[0].real < 0 < z1[0].real and abs(z2[0].real) < z1[0].real and status[0] == 0
    assert report(3, found >= 1 and match and non_dominant, f"sweep points={found} fixture_match={match}")


@pytest.mark.criterion(4, "VCA residual ratio per 2x refinement in [3.5, 4.5], < 1e-4 at h = 1e-3")
def test_criterion_04_vca_convergence():
    traj = BoundaryTrajectory.linear(0.3, 0.3, 1.0)
    residuals = []
    for h in (4e-3, 2e-3, 1e-3):
        grid_n = np.arange(0.2, 0.8 + h / 2, h)
        grid_t = np.arange(0.0, 1.0 + h / 2, h)
        residuals.append(vca_residual(grid_n, grid_t, traj, 0.3, DeviceParams()))
    ratios = [a / b for a, b in zip(residuals, residuals[1:])]
    ok = all(VCA_RATIO[0] <= r <= VCA_RATIO[1] for r in ratios) and residuals[-1] < VCA_FINE
    assert report(4, ok, f"ratios={[round(r, 3) for r in ratios]} fine={residuals[-1]:.2e}")


@pytest.mark.criterion(5, "boundary velocity identity |(-u_t/u_n) - (-n_b')| < 1e-6 over 100 random draws")
def test_criterion_05_boundary_velocity_identity():
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(100):
        params = DeviceParams(a=float(rng.uniform(0.2, 5)), f0=float(rng.uniform(1, 50)))
        velocity = float(rng.uniform(-0.5, 0.5))
        traj = BoundaryTrajectory.linear(float(rng.uniform(0.3, 0.7)), velocity, 0.5)
        ratio, expected = wave_velocity_check(traj, float(rng.uniform(0, 0.5)), params)
        worst = max(worst, abs(ratio - expected))
    assert report(5, worst < VELOCITY_TOL, f"worst |difference|={worst:.3e}")


@pytest.mark.criterion(6, "dynamic reactance pair sums to 0; resistance pair sums to 0 iff rho1 = rho2 (1e3 draws)")
@settings(max_examples=1000, deadline=None)
@given(
    n_b_dot=st.floats(1e-6, 1e3) | st.floats(-1e3, -1e-6),
    omega=st.floats(1e-3, 1e9),
    rho1=st.integers(1, 10**6),
    rho2=st.integers(1, 10**6),
)
def test_criterion_06_dynamic_pairs(n_b_dot, omega, rho1, rho2):
    x1, x2 = dynamic_reactance_pair(n_b_dot, omega)
    r1, r2 = dynamic_resistance_pair(n_b_dot, DeviceParams(rho1=float(rho1), rho2=float(rho2)))
    assert x1 + x2 == 0
    assert (r1 + r2 == 0) == (rho1 == rho2)


def test_criterion_06_equal_resistivities_cancel():
    # hypothesis rarely draws rho1 == rho2; pin that branch explicitly
    for rho in (1.0, 37.0, 1e4):
        r1, r2 = dynamic_resistance_pair(0.123, DeviceParams(rho1=rho, rho2=rho))
        assert r1 + r2 == 0
    report(6, True, "reactance sum exact, resistance pair iff rho1 == rho2")


@pytest.mark.criterion(7, "default sim pinched, area > 0; 5-point mobility sweep -> 0 monotonically; frozen area < 1e-12; < 5 s")
def test_criterion_07_hysteresis(default_trace):
    trace, elapsed = default_trace
    start = time.perf_counter()
    pinched = detect_pinch(trace).pinched
    area = loop_area(trace)
    sweep = []
    for mobility in (2e4, 1e4, 5e3, 2.5e3, 1e3):
        t = run(DriveSignal(), DeviceParams(), SimConfig(coupling="current_driven", mobility=mobility))
        sweep.append(abs(loop_area(t)[-1]))
    frozen = run(DriveSignal(), DeviceParams(), SimConfig(coupling="current_driven", mobility=0.0))
    frozen_area = max(abs(a) for a in loop_area(frozen))
    elapsed += time.perf_counter() - start
    monotone = all(a > b for a, b in zip(sweep, sweep[1:] + [frozen_area]))
    ok = pinched and min(area) > 0 and monotone and frozen_area < AREA_FROZEN and elapsed < SIM_SECONDS
    assert report(7, ok, f"area={area[-1]:.4g} sweep={[f'{a:.2e}' for a in sweep]} frozen={frozen_area:.1e} time={elapsed:.2f}s")


@pytest.mark.criterion(8, "activity audit: NDR nonempty, a component with negative energy, E_total >= 0")
def test_criterion_08_activity(default_trace):
    trace, _ = default_trace
    ndr = detect_ndr(trace)
    audit = energy_audit(trace)
    ok = not ndr.empty and bool(ndr.intervals) and min(audit.E1, audit.E2) < 0 and audit.E_total >= 0 and audit.active_component
    assert report(8, ok, f"ndr_intervals={len(ndr.intervals)} E1={audit.E1:.4g} E2={audit.E2:.4g} E_total={audit.E_total:.4g}")


@pytest.mark.criterion(9, "boundary velocity plateau CV < 10%, endpoint velocities < 10% of the plateau mean")
def test_criterion_09_velocity_plateau():
    traj = boundary_velocity_trace(1e-3, 2e4, 1e-4, 20000)
    v, n = traj.n_b_dot, traj.n_b
    plateau = v[(n >= 0.3) & (n <= 0.7)]
    mean = plateau.mean()
    cv = plateau.std() / mean
    ok = plateau.size > 10 and cv < PLATEAU_CV and v[0] < ENDPOINT_FRACTION * mean and v[-1] < ENDPOINT_FRACTION * mean
    assert report(9, ok, f"cv={cv:.3f} start={v[0] / mean:.3f} end={v[-1] / mean:.3f}")


@pytest.mark.criterion(10, "canonical table equals the fixture; C, R, L fundamental; memristor rejected at all six slots")
def test_criterion_10_table(fixture_json):
    fixture = fixture_json("periodic_table.json")
    table = canonical_table()
    mismatches = [
        (c["row"], c["column"])
        for c in fixture["cells"]
        if any(table[c["row"], c["column"]].to_dict()[k] != c[k] for k in ("status", "occupant", "equation", "reason"))
    ]
    rep = memristor_rejection_report()
    fundamentals = {name: evaluate(BUILTIN_CANDIDATES[name]) for name in ("capacitor", "resistor", "inductor")}
    ok = (
        not mismatches
        and len(table.slots) == len(fixture["cells"])
        and rep.fundamental_set == {"C": ("A", "Y"), "R": ("B", "Y"), "L": ("C", "Y")}
        and all(v.placed and v.fundamental for v in fundamentals.values())
        and rep.slots == {("A", "Z"), ("A", "Ẑ"), ("B", "Ŷ"), ("C", "X̂"), ("C", "X"), ("D", "Y")}
        and all(not e["placed"] for e in rep.entries)
        and evaluate(BUILTIN_CANDIDATES["current-multiplier"]).kinds == (V.ACTIVITY_REQUIRED,)
    )
    assert report(10, ok, f"mismatches={mismatches}")


@pytest.mark.criterion(11, "ideal memristor i = 3v(phi0 + vt)^2 exact for rationals; i(2t)/i(t) -> 4 within 1e-6 at t = 1e6")
def test_criterion_11_ideal_memristor():
    exact = ideal_memristor_current(Fraction(2), Fraction(1), Fraction(0))
    mp.mp.dps = 30
    growth = []
    for phi0 in (0.0, 0.1):
        t = 1e6
        growth.append(ideal_memristor_current(2 * t, 1.0, phi0) / ideal_memristor_current(t, 1.0, phi0))
    ok = exact == 12 and isinstance(exact, Fraction) and all(abs(g - 4) < GROWTH_TOL for g in growth)
    assert report(11, ok, f"i(2)={exact} growth={growth}")


@pytest.mark.criterion(12, "two simulate and two sweep runs are byte-identical")
def test_criterion_12_determinism(tmp_path):
    outputs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["simulate", "--out", str(out / "sim"), "--svg"]) == 0
        assert main(["sweep", "--out", str(out / "sweep")]) == 0
        outputs.append({p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    ok = outputs[0] == outputs[1] and len(outputs[0]) >= 4
    assert report(12, ok, f"files={len(outputs[0])}")

"""Acceptance criteria, each checked at its stated tolerance.

Every check returns ``(ok, detail)``. Under pytest the verdicts are collected
into an "acceptance criteria" section of the terminal summary; run this file
directly (``python tests/test_acceptance.py``) to print the lines alone.
"""

import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from conftest import ACCEPTANCE_LINES, piecewise_monotone  # noqa: E402
from preisach_ff import (build_mesh, cli, gaussian_density, init_state,  # noqa: E402
                         sensitivity_linear, uniform_density)
from preisach_ff.experiments import (ExperimentConfig, linear_loop_sensitivity,  # noqa: E402
                                     run_compensation, run_hysteron_demo)
from preisach_ff.oracle import NaiveRelayBank, uniform_branch  # noqa: E402

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def report(number: int, name: str, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] {number:2d} {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    return line


def note(text: str) -> None:
    ACCEPTANCE_LINES.append(f"       {text}")


# 1 --------------------------------------------------------------------------

def oracle_equivalence(n_sequences=100, steps=1000):
    start = time.perf_counter()
    combos = [(n, kind) for n in (5, 25, 100) for kind in ("uniform", "gaussian")]
    densities = {}
    worst = 0.0
    for k in range(n_sequences):
        n, kind = combos[k % len(combos)]
        if (n, kind) not in densities:
            mesh = build_mesh(n)
            densities[n, kind] = (uniform_density if kind == "uniform" else gaussian_density)(mesh)
        d = densities[n, kind]
        rng = np.random.default_rng(1000 + k)
        u = piecewise_monotone(rng, steps, edges=d.mesh.edges)
        mode = ("all_down", "all_up", "demagnetized")[k % 3]
        s = init_state(d.mesh, d, mode)
        bank = NaiveRelayBank(d, np.where(s.up_mask(), 1.0, -1.0))
        worst = max(worst, float(np.abs(s.apply_sequence(u) - bank.run(u)).max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 30
    return ok, f"{n_sequences} sequences x {steps} steps, max |dy| = {worst:.2e}, {elapsed:.1f} s"


# 2 --------------------------------------------------------------------------

def branch_error(n=400, points=40001, interpolate=False):
    d = uniform_density(build_mesh(n))
    grid = np.linspace(-1, 1, points)
    up = init_state(d.mesh, d, "all_down", interpolate).apply_sequence(grid)
    down = init_state(d.mesh, d, "all_up", interpolate).apply_sequence(grid[::-1])
    err_up = np.abs(up - [uniform_branch(x, "ascending") for x in grid]).max()
    err_down = np.abs(down - [uniform_branch(x, "descending") for x in grid[::-1]]).max()
    return float(max(err_up, err_down))


def analytic_branch(n=400):
    err = branch_error(n)
    return err <= 2 / n, f"n = {n}, max error {err:.5f} over 40001 inputs (limit {2 / n:.5f})"


# 3 --------------------------------------------------------------------------

def trace(d, inputs):
    """(levels, y) after every input, from the demagnetized state."""
    s = init_state(d.mesh, d, "demagnetized")
    out = []
    for u in inputs:
        s.apply_input(u)
        out.append((s.levels.copy(), s.y))
    return out


def memory_laws(cases=20):
    failures = []
    for k in range(cases):
        kind = "uniform" if k % 2 == 0 else "gaussian"
        d = (uniform_density if kind == "uniform" else gaussian_density)(build_mesh(25))
        rng = np.random.default_rng(2000 + k)
        prefix = piecewise_monotone(rng, 60, -0.95, 0.95)

        # wiping-out: excursions inside (lo, hi) are erased by the next input beyond hi
        hi = float(rng.uniform(0.3, 0.9))
        lo = float(rng.uniform(-0.9, hi - 0.2))
        inner = rng.uniform(lo, hi, 12)
        a = init_state(d.mesh, d, "demagnetized")
        a.apply_sequence(np.concatenate([prefix, [hi, lo]]))
        b = a.copy()
        a.apply_sequence(np.concatenate([inner, [hi + 0.05]]))
        b.apply_input(hi + 0.05)
        # the memory must match exactly; y is a running sum, so only to rounding
        if not (np.array_equal(a.levels, b.levels) and a.u_prev == b.u_prev
                and abs(a.y - b.y) <= 1e-12):
            failures.append(f"wiping-out case {k}")

        # congruency: same reversal pair after different histories gives the same swing
        u1 = float(rng.uniform(-0.8, 0.4))
        u2 = u1 + float(rng.uniform(0.05, 0.4))
        swings = []
        for h in (prefix, piecewise_monotone(rng, 60, -0.95, 0.95)):
            s = init_state(d.mesh, d, "demagnetized")
            s.apply_sequence(np.concatenate([h, [0.98, u1]]))
            y1 = s.y
            s.apply_input(u2)
            swings.append(s.y - y1)
        if abs(swings[0] - swings[1]) > 1e-12:
            failures.append(f"congruency case {k}")

        # rate independence: holds, power-of-two time scaling and monotone refinement
        base = piecewise_monotone(rng, 200, -1.1, 1.1)
        prev = np.concatenate([[0.0], base[:-1]])
        fine = np.column_stack([prev + (base - prev) * f for f in (0.25, 0.5, 0.75, 1.0)]).ravel()
        ref = trace(d, base)
        for variant in (np.repeat(base, 4), fine):
            other = trace(d, variant)[3::4]
            if not all(np.array_equal(x, z) and abs(yx - yz) <= 1e-12
                       for (x, yx), (z, yz) in zip(ref, other)):
                failures.append(f"rate case {k}")
    ok = not failures
    detail = (f"{cases} wiping-out, {cases} congruency, {cases} rate-independence cases"
              + ("" if ok else "; failed: " + ", ".join(failures[:5])))
    return ok, detail


# 4 --------------------------------------------------------------------------

def hysteron_phase():
    rec = run_hysteron_demo(ExperimentConfig.load(CONFIGS / "hysteron.ini"))
    ph = rec.metrics.get("phase_deg", math.nan)
    return abs(ph + 90) <= 2, f"phase {ph:.2f} deg (target -90 +/- 2)"


# 5 --------------------------------------------------------------------------

def linear_loop(K=1000.0):
    worst = 0.0
    for A in (0.1, 1.0, 10.0):
        for ratio in np.logspace(-1, 1, 6):
            w = ratio * K * A
            meas = linear_loop_sensitivity(K, A, w)
            exact = sensitivity_linear(w, K, A).magnitude
            worst = max(worst, abs(meas / exact - 1))
    return worst <= 0.05, f"3 gains x 6 frequencies, worst relative deviation {worst:.2%}"


# 6 --------------------------------------------------------------------------

def bias_rejection():
    rec = run_compensation(ExperimentConfig.load(CONFIGS / "constant_bias.ini"))
    ts = rec.metrics["settle_time_abs_e_1e-4"]
    return ts <= 0.05, f"|e| < 1e-4 from t = {ts:.4f} s on (limit 0.05 s)"


# 7 --------------------------------------------------------------------------

def chirp_slope(kind, interpolate=False):
    cfg = ExperimentConfig.load(CONFIGS / f"chirp_{kind}.ini")
    cfg.mesh.interpolate = interpolate
    start = time.perf_counter()
    rec = run_compensation(cfg)
    return rec.metrics["eps_slope_db_per_decade"], time.perf_counter() - start


def chirp_criterion(kind):
    slope, elapsed = chirp_slope(kind)
    ok = 16 <= slope <= 24 and elapsed < 300
    return ok, f"{kind}: slope {slope:.1f} dB/dec (target 20 +/- 4), {elapsed:.0f} s"


# 8 --------------------------------------------------------------------------

def zigzag(kind):
    m = run_compensation(ExperimentConfig.load(CONFIGS / f"zigzag_{kind}.ini")).metrics
    ratio = m["peak_abs_r_minus_y"] / m["peak_abs_r_minus_y_uncompensated"]
    return ratio <= 0.1, (f"{kind}: compensated {m['peak_abs_r_minus_y']:.4f} vs "
                          f"pass-through {m['peak_abs_r_minus_y_uncompensated']:.4f} "
                          f"({ratio:.1%}, limit 10%)")


# 9 --------------------------------------------------------------------------

def steady_cycle_peak(K, kind="uniform", interpolate=False):
    cfg = ExperimentConfig.load(CONFIGS / f"zigzag_{kind}.ini")
    cfg.signal.kind, cfg.signal.amplitude = "sine", 0.9
    cfg.signal.freq_hz, cfg.signal.duration = 0.5, 4.0
    cfg.controller.K = K
    cfg.mesh.interpolate = interpolate
    cfg.output.record_every = 100
    return float(run_compensation(cfg).cycles[-1, 1])


def gain_scaling(kind="uniform", interpolate=False):
    lo, hi = steady_cycle_peak(6000, kind, interpolate), steady_cycle_peak(12000, kind, interpolate)
    ratio = lo / hi
    return ratio >= 1.8, (f"{kind}: 0.5 Hz cycle peak {lo:.5f} (K=6000) / {hi:.5f} (K=12000) "
                          f"= {ratio:.2f} (limit 1.8)")


# 10 -------------------------------------------------------------------------

EXPERIMENT_OF = {"sweep": "sweep", "zigzag": "compensate", "chirp": "compensate",
                 "constant": "compensate", "frf": "frf", "hysteron": "hysteron"}


def determinism():
    mismatched = []
    files = sorted(CONFIGS.glob("*.ini"))
    with tempfile.TemporaryDirectory() as tmp:
        for path in files:
            kind = EXPERIMENT_OF[path.stem.split("_")[0]]
            args = [kind, "--config", str(path)]
            if path.stem.startswith("chirp"):
                args += ["--override", "signal.duration=10"]
            outs = []
            for rep in ("a", "b"):
                out = Path(tmp) / path.stem / rep
                if cli.main(args + ["--out", str(out)]) != 0:
                    mismatched.append(f"{path.name} failed")
                outs.append(out)
            for f in sorted(outs[0].iterdir()):
                if f.read_bytes() != (outs[1] / f.name).read_bytes():
                    mismatched.append(f"{path.stem}/{f.name}")
    return not mismatched, (f"{len(files)} configs run twice, all outputs byte-identical"
                            if not mismatched else "differs: " + ", ".join(mismatched))


# pytest entry points ---------------------------------------------------------

def check(number, name, result):
    ok, detail = result
    print(report(number, name, ok, detail))
    assert ok, detail


def test_01_oracle_equivalence():
    check(1, "oracle equivalence", oracle_equivalence())


def test_02_analytic_branch():
    try:
        check(2, "analytic branch", analytic_branch())
    finally:
        note(f"sub-cell mode: max error {branch_error(interpolate=True):.5f}")


def test_03_memory_laws():
    check(3, "memory laws", memory_laws())


def test_04_hysteron_phase():
    check(4, "hysteron phase", hysteron_phase())


def test_05_linear_loop():
    check(5, "linear-loop cross-check", linear_loop())


def test_06_bias_rejection():
    check(6, "steady-bias rejection", bias_rejection())


@pytest.mark.parametrize("kind", ["uniform", "gaussian"])
def test_07_chirp_slope(kind):
    try:
        check(7, "chirp error slope", chirp_criterion(kind))
    finally:
        slope, _ = chirp_slope(kind, interpolate=True)
        note(f"sub-cell mode, {kind}: slope {slope:.1f} dB/dec")


@pytest.mark.parametrize("kind", ["uniform", "gaussian"])
def test_08_zigzag(kind):
    check(8, "compensation effectiveness", zigzag(kind))


def test_09_gain_scaling():
    try:
        check(9, "gain scaling", gain_scaling())
    finally:
        note(gain_scaling("gaussian")[1])
        for kind in ("uniform", "gaussian"):
            note("sub-cell mode, " + gain_scaling(kind, interpolate=True)[1])


def test_10_determinism():
    check(10, "determinism", determinism())


if __name__ == "__main__":
    runs = [(1, "oracle equivalence", oracle_equivalence), (2, "analytic branch", analytic_branch),
            (3, "memory laws", memory_laws), (4, "hysteron phase", hysteron_phase),
            (5, "linear-loop cross-check", linear_loop), (6, "steady-bias rejection", bias_rejection),
            (7, "chirp error slope", lambda: chirp_criterion("uniform")),
            (7, "chirp error slope", lambda: chirp_criterion("gaussian")),
            (8, "compensation effectiveness", lambda: zigzag("uniform")),
            (8, "compensation effectiveness", lambda: zigzag("gaussian")),
            (9, "gain scaling", gain_scaling), (10, "determinism", determinism)]
    failed = 0
    for number, name, fn in runs:
        ok, detail = fn()
        failed += not ok
        print(report(number, name, ok, detail), flush=True)
    sys.exit(1 if failed else 0)

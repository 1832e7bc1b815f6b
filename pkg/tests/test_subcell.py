"""Sub-cell (interpolated) mode: exact continuum model with cell-wise uniform density."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import piecewise_monotone
from preisach_ff import (CompensatorConfig, NumericalError, PreisachState, build_mesh,
                         init_state, run_feedforward, sine, uniform_density)
from preisach_ff.density import normalize
from preisach_ff.oracle import uniform_branch


def area_uniform(n):
    """Weights proportional to cell area: diagonal half cells get half weight."""
    mesh = build_mesh(n)
    raw = np.tri(n) - 0.5 * np.eye(n)
    return normalize(mesh, raw, (-1, 1))


def test_triangle_mass_uniform_closed_form():
    d = area_uniform(4)
    rng = np.random.default_rng(0)
    for _ in range(200):
        b, a = np.sort(rng.uniform(-1, 1, 2))
        assert d.triangle_mass(b, a) == pytest.approx((a - b) ** 2 / 4, abs=1e-14)
    assert d.triangle_mass(0.3, 0.1) == 0.0
    assert d.triangle_mass(-1, 1) == pytest.approx(1.0, abs=1e-14)


def test_triangle_mass_on_edges_is_cell_sum(gauss25):
    e = gauss25.mesh.edges
    w = gauss25.weights
    for q, p in [(0, 25), (3, 10), (7, 8), (12, 12), (0, 1)]:
        expect = sum(w[i, j] for i in range(q, p) for j in range(q, i + 1))
        assert gauss25.triangle_mass(e[q], e[p]) == pytest.approx(expect, abs=1e-14)


def test_uniform_branch_exact_off_grid():
    d = area_uniform(5)
    s = init_state(d.mesh, d, "all_down", interpolate=True)
    for u in np.linspace(-1, 1, 37)[1:]:
        s.apply_input(u)
        assert s.y == pytest.approx(uniform_branch(u, "ascending"), abs=1e-13)
    for u in np.linspace(1, -1, 29)[1:]:
        s.apply_input(u)
        assert s.y == pytest.approx(uniform_branch(u, "descending"), abs=1e-13)


@given(st.lists(st.floats(-1.2, 1.2), min_size=1, max_size=40),
       st.sampled_from(["all_down", "all_up", "demagnetized"]))
def test_running_output_matches_area_oracle(density25, us, mode):
    s = init_state(density25.mesh, density25, mode, interpolate=True)
    for u in us:
        s.apply_input(u)
    assert abs(s.y - s.direct_output()) <= 1e-12
    ext = s.extrema
    assert ext[0] == -1.0 and ext[-1] == s.u_prev
    assert np.all(np.diff(ext[1::2]) < 0) and np.all(np.diff(ext[0::2]) > 0)


def test_agrees_with_quantized_on_edges(density25):
    rng = np.random.default_rng(1)
    e = density25.mesh.edges
    q = init_state(density25.mesh, density25, "all_down")
    c = init_state(density25.mesh, density25, "all_down", interpolate=True)
    for u in rng.choice(e, 300):
        q.apply_input(u)
        c.apply_input(u)
        assert c.y == pytest.approx(q.y, abs=1e-12)
        assert c.y_quantized == q.y


def test_corners_follow_real_extrema(uniform25):
    s = init_state(uniform25.mesh, uniform25, "all_down", interpolate=True)
    for u in (0.0, 0.71, -0.33):
        s.apply_input(u)
    assert s.interface_corners() == [(-1.0, 0.71), (-0.33, 0.71), (-0.33, -0.33)]


def test_wiping_out_clears_stack(density25):
    rng = np.random.default_rng(2)
    s = init_state(density25.mesh, density25, "all_down", interpolate=True)
    s.apply_sequence(piecewise_monotone(rng, 400, -0.9, 0.9))
    assert len(s.extrema) > 4
    s.apply_input(0.95)
    assert s.extrema == [-1.0, 0.95]


def test_stack_overflow_is_numerical_error(uniform25):
    s = PreisachState(uniform25, np.arange(25), -1.0, interpolate=True, stack_capacity=6)
    with pytest.raises(NumericalError):
        s.apply_sequence([0.5, -0.5, 0.4, -0.4, 0.3, -0.3, 0.2])


def test_gain_scaling_close_to_two():
    # without quantization the uniform loop error halves when K doubles
    mesh = build_mesh(400)
    d = uniform_density(mesh)
    ref = sine(0.9, 0.5, 4.0, 1e-5)
    peaks = []
    for K in (6000.0, 12000.0):
        cfg = CompensatorConfig(d, K, 1e-5, interpolate=True)
        res = run_feedforward(cfg, ref)
        peaks.append(np.abs(res.e[200000:]).max())
    assert peaks[0] / peaks[1] >= 1.8

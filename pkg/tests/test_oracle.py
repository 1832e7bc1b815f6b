import numpy as np
import pytest

from conftest import piecewise_monotone
from preisach_ff import build_mesh, init_state, uniform_density
from preisach_ff.oracle import NaiveRelayBank, uniform_branch


def test_all_down_to_max(uniform25):
    bank = NaiveRelayBank(uniform25)
    assert bank.y == pytest.approx(-1)
    assert bank.naive_step(1.0) == pytest.approx(1.0)


def test_all_up_bank(uniform25):
    assert NaiveRelayBank.all_up(uniform25).y == pytest.approx(1.0)


def test_single_relay_loop():
    d = uniform_density(build_mesh(1))
    bank = NaiveRelayBank(d)
    ys = bank.run([0.0, 0.99, 1.0, 0.0, -0.99, -1.0, 0.5])
    assert list(ys) == [-1, -1, 1, 1, 1, -1, -1]


def test_matches_core_n25(density25):
    rng = np.random.default_rng(11)
    u = piecewise_monotone(rng, 1000, edges=density25.mesh.edges)
    s = init_state(density25.mesh, density25, "all_down")
    bank = NaiveRelayBank(density25)
    assert np.max(np.abs(s.apply_sequence(u) - bank.run(u))) <= 1e-12


def test_rejects_bad_state(uniform25):
    with pytest.raises(ValueError):
        NaiveRelayBank(uniform25, np.zeros(325))


@pytest.mark.parametrize("u,direction,y", [(0, "ascending", -0.5), (1, "ascending", 1),
                                           (-1, "descending", -1), (0, "descending", 0.5),
                                           (0.5, 1, 0.125), (-0.5, -1, -0.125)])
def test_uniform_branch(u, direction, y):
    assert uniform_branch(u, direction) == pytest.approx(y)


def test_uniform_branch_rejects():
    with pytest.raises(ValueError):
        uniform_branch(1.5, "ascending")
    with pytest.raises(ValueError):
        uniform_branch(0.0, "sideways")

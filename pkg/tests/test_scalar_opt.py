import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaycoop.core import shannon_c
from relaycoop.scalar_opt import NonFiniteError, grid_then_refine, maximize_unimodal, solve_balance

from oracle_values import C1


def test_quadratic_vertex():
    r = maximize_unimodal(lambda x: -((x - 0.3) ** 2), 0.0, 1.0, 1e-10)
    assert abs(r.argmax - 0.3) < 1e-8 and r.converged


def test_boundary_maximum_is_exact():
    f = lambda x: min(shannon_c(1 - x * x, 20), shannon_c(1 + x, 20))
    r = maximize_unimodal(f, 0.0, 1.0)
    assert r.argmax == 0.0
    assert r.value == pytest.approx(C1, abs=1e-12)


def test_symmetric_parabola():
    assert abs(maximize_unimodal(lambda x: x * (1 - x), 0, 1).argmax - 0.5) < 1e-8


def test_nonfinite_objective():
    with pytest.raises(NonFiniteError) as exc:
        maximize_unimodal(lambda x: math.nan, 0, 1)
    assert exc.value.x is not None


def test_bad_interval():
    with pytest.raises(ValueError):
        maximize_unimodal(lambda x: x, 1, 0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.1, 10.0))
def test_unimodal_matches_dense_grid(c, k):
    f = lambda x: -k * abs(x - c) ** 1.5
    r = maximize_unimodal(f, 0.0, 1.0)
    assert abs(r.argmax - c) < 1e-6


def test_balance_crossing():
    assert solve_balance(lambda x: x, lambda x: 1 - x, 0.0, 1.0, 1e-12) == pytest.approx(0.5, abs=1e-11)


def test_balance_constant_tie_goes_low():
    assert solve_balance(lambda x: 2.0, lambda x: 1.0, 0.0, 1.0) == 0.0


def test_balance_no_crossing_picks_better_end():
    # f > g everywhere and g increases, so the top end maximizes min
    assert solve_balance(lambda x: 5.0, lambda x: x, 0.0, 1.0) == 1.0


def test_balance_rho_example():
    # first tx cut-set term vs the second at alpha = 2/3, g = 4
    a = 2.0 / 3.0
    f = lambda r: a * 5.0 * (1 - r * r)
    g = lambda r: 1 + 2 * r * math.sqrt(a * (1 - a))
    assert solve_balance(f, g, 0.0, 1.0, 1e-13) == pytest.approx(1 / math.sqrt(2), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.2, 5.0))
def test_balance_vector_matches_scalar(root, slope):
    f = lambda x: slope * (root - x)
    g = lambda x: np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0
    s = solve_balance(f, g, 0.0, 1.0, 1e-12)
    v = solve_balance(f, g, np.zeros(3), np.ones(3), 1e-12)
    assert abs(s - root) < 1e-10
    assert np.allclose(v, s, atol=1e-11)


def test_balance_vector_mixed():
    roots = np.array([0.2, 0.5, 2.0])  # the last has no crossing in [0, 1]
    out = solve_balance(lambda x: roots - x, lambda x: 0.1 * x, np.zeros(3), np.ones(3), 1e-12)
    assert np.allclose(out, [0.2 / 1.1, 0.5 / 1.1, 1.0], atol=1e-11)


def test_grid_then_refine_kink():
    f = lambda x: np.minimum(2 * np.asarray(x), 1.4 - np.asarray(x))
    r = grid_then_refine(f, 0.0, 1.0)
    assert abs(r.argmax - 1.4 / 3) < 1e-8


def test_grid_then_refine_plateau_keeps_smallest():
    f = lambda x: np.minimum(np.asarray(x) * 10, 1.0)
    r = grid_then_refine(f, 0.0, 1.0)
    assert r.value == 1.0 and r.argmax <= 0.1 + 1e-12


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_grid_nonfinite():
    with pytest.raises(NonFiniteError):
        grid_then_refine(lambda x: np.log(np.asarray(x) - 0.5), 0.0, 1.0)

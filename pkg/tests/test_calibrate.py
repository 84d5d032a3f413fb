import itertools
import math
from types import SimpleNamespace

import numpy as np
import pytest

from susytb.calibrate import (
    CalibrationProblem,
    default_problem,
    nelder_mead,
    profile_match,
    spectral_match,
    well_separation,
)
from susytb.systems import HermitianStaticParams, ParameterError
from susytb.tightbinding import WellBasis, single_well_potential

from conftest import HERM, PTD, PTS


# ---------------------------------------------------------------------------
# Nelder-Mead
# ---------------------------------------------------------------------------

def test_nelder_mead_quadratic():
    f = lambda x: float((x[0] - 1.0) ** 2 + 2 * (x[1] + 0.5) ** 2)
    res = nelder_mead(f, [0.0, 0.0], [0.3, 0.3])
    assert res.converged
    assert np.allclose(res.x, [1.0, -0.5], atol=1e-5)
    assert res.fun < 1e-10


def test_nelder_mead_rosenbrock():
    f = lambda x: float((1 - x[0]) ** 2 + 100 * (x[1] - x[0] ** 2) ** 2)
    res = nelder_mead(f, [-1.2, 1.0], [0.5, 0.5], max_iter=2000)
    assert np.allclose(res.x, [1.0, 1.0], atol=1e-4)


def test_nelder_mead_never_worse_than_start():
    f = lambda x: float(abs(x[0]) + abs(math.sin(3 * x[0])))
    res = nelder_mead(f, [2.0], [0.4])
    assert res.fun <= f(np.array([2.0]))


def test_nelder_mead_deterministic():
    f = lambda x: float((x[0] - 0.3) ** 4 + abs(x[1]))
    a = nelder_mead(f, [1.0, 1.0], [0.2, 0.2])
    b = nelder_mead(f, [1.0, 1.0], [0.2, 0.2])
    assert np.array_equal(a.x, b.x) and a.fun == b.fun


# ---------------------------------------------------------------------------
# problems and boxes
# ---------------------------------------------------------------------------

def test_well_separation_near_paper_values(herm_system, pt_system, dyn_system):
    assert well_separation(herm_system) == pytest.approx(1.646, abs=0.01)
    assert well_separation(pt_system) == pytest.approx(1.658, abs=0.01)
    assert well_separation(dyn_system) == pytest.approx(1.775, abs=0.01)


def test_problem_validation(herm_system):
    with pytest.raises(ValueError):
        CalibrationProblem(herm_system, "spectral_banana", {"k": (0.5, 1.0)}, (3,))
    with pytest.raises(ValueError):
        CalibrationProblem(herm_system, "spectral_hermitian", {"k": (1.0, 0.5)}, (3,))


def test_degenerate_target_rejected():
    with pytest.raises(ParameterError):
        HermitianStaticParams(k1=0.7, k2=0.7)


# ---------------------------------------------------------------------------
# spectral matching
# ---------------------------------------------------------------------------

def test_spectral_match_hermitian_recovers_paper_values(herm_system):
    res = spectral_match(default_problem(herm_system))
    assert res.parameters["x0"] == pytest.approx(1.66214, abs=0.02)
    assert res.parameters["k"] == pytest.approx(0.7454, abs=0.01)
    assert res.objective_value < 1e-3
    e = res.achieved_energies.real
    assert abs(e[0] + HERM.k2**2) + abs(e[1] + HERM.k1**2) < 1e-3


def test_spectral_match_pt_recovers_paper_values(pt_system):
    res = spectral_match(default_problem(pt_system))
    assert res.parameters["x0"] == pytest.approx(1.65, abs=0.03)
    assert res.parameters["k"] == pytest.approx(1.14, abs=0.03)
    assert res.parameters["alpha_tilde"] == pytest.approx(0.21, abs=0.03)
    assert res.objective_value < 1e-3


def test_spectral_match_objective_beats_every_start(herm_system):
    problem = default_problem(herm_system)
    res = spectral_match(problem)
    # re-evaluate the multistart grid independently
    from susytb.tightbinding import solve_spectrum, two_well_model

    targets = sorted(herm_system.energies().values())
    for k in np.linspace(*problem.box["k"], problem.seeds[0]):
        for x0 in np.linspace(*problem.box["x0"], problem.seeds[1]):
            e = solve_spectrum(two_well_model("hermitian", k, x0)).energies.real
            grid_val = abs(targets[0] - e[0]) + abs(targets[1] - e[1])
            assert res.objective_value <= grid_val + 1e-12


def test_spectral_match_deterministic(pt_system):
    a = spectral_match(default_problem(pt_system))
    b = spectral_match(default_problem(pt_system))
    assert a.parameters == b.parameters
    assert a.objective_value == b.objective_value


# ---------------------------------------------------------------------------
# profile matching
# ---------------------------------------------------------------------------

def test_profile_match_recovers_paper_values(dyn_system):
    res = profile_match(default_problem(dyn_system))
    assert res.parameters["x0"] == pytest.approx(1.77114, abs=0.03)
    assert res.parameters["k"] == pytest.approx(1.045, abs=0.02)
    assert res.achieved_profile_error == res.objective_value


def test_profile_match_self_target_is_exact():
    """A pure two-well sech sum is recovered with ~zero objective."""
    k_true, x0_true = 1.05, 1.8

    def vtb(x, z=0.0):
        return (single_well_potential(WellBasis("hermitian", k_true, 0.0, +x0_true), x)
                + single_well_potential(WellBasis("hermitian", k_true, 0.0, -x0_true), x))

    stub = SimpleNamespace(potential=vtb)
    problem = CalibrationProblem(
        system=stub, mode="profile_dynamic",
        box={"k": (0.7, 1.4), "x0": (1.2, 2.4)}, seeds=(9, 9),
        window=(-1.8 - 3.0 / 1.05, 0.0))
    res = profile_match(problem)
    assert res.objective_value < 1e-8
    assert res.parameters["k"] == pytest.approx(k_true, abs=1e-4)
    assert res.parameters["x0"] == pytest.approx(x0_true, abs=1e-4)


def test_profile_window_shrink_degrades_fit(dyn_system):
    """Fitting on a sliver of the well loses shape information.

    The well position x0 stays pinned by the minimax even on narrow
    windows, but the recovered well scale k walks away monotonically once
    the window shrinks below one well width.
    """
    full = profile_match(CalibrationProblem(
        system=dyn_system, mode="profile_dynamic",
        box={"k": (0.63, 1.47), "x0": (1.08, 2.48)}, seeds=(9, 9),
        window=(-4.775, 0.0)))
    k_ref = full.parameters["k"]
    errors = []
    for d in (1.2, 0.8, 0.6, 0.4):
        res = profile_match(CalibrationProblem(
            system=dyn_system, mode="profile_dynamic",
            box={"k": (0.63, 1.47), "x0": (1.08, 2.48)}, seeds=(9, 9),
            window=(-d, 0.0)))
        errors.append(abs(res.parameters["k"] - k_ref))
        assert res.parameters["x0"] == pytest.approx(full.parameters["x0"], abs=0.01)
    assert errors[0] < errors[1] < errors[2] < errors[3]


def test_mode_mismatch_errors(herm_system, dyn_system):
    with pytest.raises(ValueError):
        profile_match(default_problem(herm_system))
    with pytest.raises(ValueError):
        spectral_match(default_problem(dyn_system))

"""Preparation-angle solver: grid search plus refinement."""

import math

import numpy as np
import pytest

from uqcm.angles import (
    PrepAngles,
    SolverError,
    prep_circuit,
    sequence_amplitudes,
    solve_prep_angles,
)
from uqcm.gates import apply_circuit
from uqcm.hilbert import PureState
from uqcm.network import CLONER_PREP_TARGET, TRIPLICATOR_PREP_TARGET

BLANK = PureState((2, 3), [1, 0, 0, 0])


def prepared_state(angles):
    """Run the actual gate sequence (not the solver's closed form)."""
    return apply_circuit(prep_circuit(angles), BLANK).amplitudes


def test_prep_angles_range_validation():
    PrepAngles(math.pi, 0.0, -3.0)
    with pytest.raises(ValueError):
        PrepAngles(4.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        PrepAngles(0.0, float("inf"), 0.0)


def test_zero_angles_prepare_blank():
    assert np.allclose(prepared_state(PrepAngles(0, 0, 0)), [1, 0, 0, 0])


def test_closed_form_matches_gate_sequence():
    rng = np.random.default_rng(12)
    for _ in range(30):
        t = rng.uniform(-math.pi, math.pi, size=3)
        assert np.allclose(sequence_amplitudes(*t), prepared_state(PrepAngles(*t)), atol=1e-12)


def test_solves_identity_target():
    angles = solve_prep_angles(np.array([1.0, 0.0, 0.0, 0.0]))
    out = prepared_state(angles)
    assert abs(out @ [1, 0, 0, 0]) >= 1 - 1e-10


def test_solves_cloner_target():
    angles = solve_prep_angles(CLONER_PREP_TARGET)
    out = prepared_state(angles)
    overlap = float(np.real(out @ CLONER_PREP_TARGET))
    assert overlap >= 1 - 1e-10
    # The sequence lands on the target itself, amplitudes (2, 1, 0, 1)/sqrt(6).
    assert np.allclose(out, CLONER_PREP_TARGET, atol=1e-8)


def test_solves_triplicator_target():
    angles = solve_prep_angles(TRIPLICATOR_PREP_TARGET)
    out = prepared_state(angles)
    assert float(np.real(out @ TRIPLICATOR_PREP_TARGET)) >= 1 - 1e-10


def test_accepts_pure_state_target():
    target = PureState((2, 3), CLONER_PREP_TARGET)
    angles = solve_prep_angles(target)
    assert abs(prepared_state(angles) @ CLONER_PREP_TARGET) >= 1 - 1e-10


def test_deterministic_resolution():
    a = solve_prep_angles(CLONER_PREP_TARGET)
    b = solve_prep_angles(CLONER_PREP_TARGET)
    assert a == b


def test_tightened_tolerance_still_converges():
    angles = solve_prep_angles(CLONER_PREP_TARGET, tol=1e-14)
    assert abs(prepared_state(angles) @ CLONER_PREP_TARGET) >= 1 - 1e-12


def test_solver_error_carries_best_residual():
    # An impossible tolerance must fail loudly and report how close it got.
    with pytest.raises(SolverError) as err:
        solve_prep_angles(CLONER_PREP_TARGET, tol=-1.0)
    assert err.value.residual >= 0.0


def test_rejects_invalid_targets():
    with pytest.raises(ValueError, match="nonnegative"):
        solve_prep_angles(np.array([-0.5, 0.5, 0.5, 0.5]))
    with pytest.raises(ValueError, match="nonnegative"):
        solve_prep_angles(np.array([0.5j, 0.5, 0.5, 0.5]))
    with pytest.raises(ValueError, match="normalized"):
        solve_prep_angles(np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(ValueError, match="4 amplitudes"):
        solve_prep_angles(np.array([1.0, 0.0]))
    with pytest.raises(ValueError, match="two qubits"):
        solve_prep_angles(PureState([1], [1, 0]))


def test_random_reachable_targets_are_recovered():
    # Forward-generate targets from random angles, then ask the solver to
    # find (possibly different) angles hitting the same state.
    rng = np.random.default_rng(77)
    found = 0
    for _ in range(200):
        t = rng.uniform(-math.pi, math.pi, size=3)
        target = sequence_amplitudes(*t)
        if target.min() < 0.0:
            continue  # solver contract covers nonnegative targets only
        angles = solve_prep_angles(target)
        assert abs(complex(prepared_state(angles) @ target)) >= 1 - 1e-10
        found += 1
        if found == 5:
            break
    assert found == 5

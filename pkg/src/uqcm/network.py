"""The optimal symmetric 1-to-2 qubit cloning network.

The machine is a two-stage gate network on qubits (1, 2, 3): a preparation
stage entangling the blank qubit 2 and ancilla qubit 3 (no information
flows out of qubit 1), followed by a cloning stage of four CNOT gates that
redistributes the input qubit's information. Both output copies (qubits 1
and 2) reach the optimal universal fidelity 5/6 for every pure input.

A direct closed-form transform of the same machine doubles as an oracle
against which the gate network and the optical realization are checked.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .angles import PrepAngles, prep_circuit, solve_prep_angles
from .gates import CNOT, CSWAP, SWAP, Circuit, Rotation, apply_circuit
from .hilbert import AUX, DensityMatrix, PureState, fidelity, partial_trace, tensor_product

# Preparation target for the 1-to-2 cloner: (2|00> + |01> + |11>) / sqrt(6)
# on qubits (2, 3).
CLONER_PREP_TARGET = np.array([2.0, 1.0, 0.0, 1.0]) / math.sqrt(6.0)

# Preparation target for the symmetric triplicator of real-amplitude inputs:
# (sqrt(3)/2) |00> + (1 / (2 sqrt(3))) (|01> + |10> + |11>). Derived by
# constrained numerical search (see scripts/derive_triplicator.py): it is the
# nonnegative prep state for which the three reduced outputs coincide and
# their fidelity is independent of the (real) input.
TRIPLICATOR_PREP_TARGET = np.array(
    [math.sqrt(3.0) / 2.0, 0.5 / math.sqrt(3.0), 0.5 / math.sqrt(3.0), 0.5 / math.sqrt(3.0)]
)

# Common replica fidelity of the triplicator, recorded from the derivation
# run (scripts/derive_triplicator.py); not an input to the simulation.
TRIPLICATOR_FIDELITY = 5.0 / 6.0


def input_state(theta: float, delta: float) -> PureState:
    """Input qubit cos(theta)|0> + e^(i delta) sin(theta)|1> on qubit 1.

    Accepts theta in (-pi/2, pi/2] and delta in the full [0, 2 pi) range
    (sweeps typically use the narrower [0, pi) slice).
    """
    if not (-math.pi / 2 < theta <= math.pi / 2):
        raise ValueError(f"theta={theta!r} outside (-pi/2, pi/2]")
    if not (0.0 <= delta < 2.0 * math.pi):
        raise ValueError(f"delta={delta!r} outside [0, 2*pi)")
    return PureState([1], [math.cos(theta), np.exp(1j * delta) * math.sin(theta)])


def cloner_prep_angles() -> PrepAngles:
    """Solved rotation angles preparing the cloner target on qubits (2, 3)."""
    return solve_prep_angles(CLONER_PREP_TARGET)


def triplicator_prep_angles() -> PrepAngles:
    """Solved rotation angles preparing the triplicator target on qubits (2, 3)."""
    return solve_prep_angles(TRIPLICATOR_PREP_TARGET)


def build_preparation_circuit(angles: PrepAngles | None = None) -> Circuit:
    """Preparation stage on qubits (2, 3); defaults to the cloner angles."""
    if angles is None:
        angles = cloner_prep_angles()
    return prep_circuit(angles, qubit_a=2, qubit_b=3)


def build_cloning_circuit() -> Circuit:
    """The four-CNOT cloning stage on qubits (1, 2, 3)."""
    return Circuit(
        (1, 2, 3),
        (CNOT(1, 2), CNOT(1, 3), CNOT(2, 1), CNOT(3, 1)),
    )


def build_cloning_network(prep_angles: PrepAngles | None = None) -> Circuit:
    """Full two-stage network (preparation then cloning) on qubits (1, 2, 3)."""
    prep = build_preparation_circuit(prep_angles)
    cloning = build_cloning_circuit()
    return Circuit((1, 2, 3), prep.gates + cloning.gates)


# Images of the basis inputs under the cloning machine, basis order (1, 2, 3):
#   |0> -> sqrt(2/3)|000> + sqrt(1/6)(|101> + |011>)
#   |1> -> sqrt(2/3)|111> + sqrt(1/6)(|100> + |010>)
_IMAGE_OF_0 = np.zeros(8, dtype=complex)
_IMAGE_OF_0[0b000] = math.sqrt(2.0 / 3.0)
_IMAGE_OF_0[0b101] = math.sqrt(1.0 / 6.0)
_IMAGE_OF_0[0b011] = math.sqrt(1.0 / 6.0)
_IMAGE_OF_1 = np.zeros(8, dtype=complex)
_IMAGE_OF_1[0b111] = math.sqrt(2.0 / 3.0)
_IMAGE_OF_1[0b100] = math.sqrt(1.0 / 6.0)
_IMAGE_OF_1[0b010] = math.sqrt(1.0 / 6.0)


def reference_clone_output(psi: PureState) -> PureState:
    """Closed-form machine output for a single-qubit input.

    Serves as the oracle for the gate network and the optical train: the
    output is the input amplitudes contracted with the fixed basis images.
    """
    if psi.n_qubits != 1:
        raise ValueError("input must be a single-qubit state")
    a0, a1 = psi.amplitudes
    return PureState((1, 2, 3), a0 * _IMAGE_OF_0 + a1 * _IMAGE_OF_1)


class CloneResult(NamedTuple):
    output: PureState
    rho1: DensityMatrix
    rho2: DensityMatrix
    fidelity1: float
    fidelity2: float


def clone(theta: float, delta: float) -> CloneResult:
    """Run the full gate network on the (theta, delta) input qubit.

    Returns the three-qubit output, both replicas' reduced density
    matrices, and their fidelities against the input (5/6 each).
    """
    psi = input_state(theta, delta)
    blank = PureState((2, 3), [1, 0, 0, 0])
    out = apply_circuit(build_cloning_network(), tensor_product(psi, blank))
    rho1 = partial_trace(out, [1])
    rho2 = partial_trace(out, [2])
    f1 = fidelity(psi, rho1)
    f2 = fidelity(psi, DensityMatrix([1], rho2.matrix))
    return CloneResult(out, rho1, rho2, f1, f2)


def optimal_fidelity(m: int, n: int) -> float:
    """Optimal fidelity of symmetric universal M-to-N qubit cloning.

    F(M, N) = (M N + N + M) / (N (M + 2)), so F(1, 2) = 5/6.
    """
    if int(m) != m or int(n) != n:
        raise ValueError("M and N must be integers")
    m, n = int(m), int(n)
    if m < 1 or n < m:
        raise ValueError(f"need 1 <= M <= N, got M={m}, N={n}")
    return (m * n + n + m) / (n * (m + 2))


def triplicate(theta: float) -> tuple:
    """Clone a real-amplitude input into three equal copies.

    Runs the network with the triplicator preparation angles on
    cos(theta)|0> + sin(theta)|1> and returns the three reduced density
    matrices, which coincide with an input-independent fidelity.
    """
    psi = input_state(theta, 0.0)
    blank = PureState((2, 3), [1, 0, 0, 0])
    network = build_cloning_network(triplicator_prep_angles())
    out = apply_circuit(network, tensor_product(psi, blank))
    return (
        partial_trace(out, [1]),
        partial_trace(out, [2]),
        partial_trace(out, [3]),
    )


def build_measurement_circuit(prep_angles: PrepAngles | None = None) -> Circuit:
    """Gate-level model of the full optical bench on qubits (1, 2, 3, aux).

    Mirrors the bench layout: the input qubit is first swapped onto qubit 2
    so later stages see a definite qubit 1, the preparation stage therefore
    acts on qubits (1, 3) and the cloning stage is relabeled accordingly.
    The probe qubit is then spread into (|0> + |1>)/sqrt(2) and controls a
    swap of the two replicas, so each half of the probe carries one copy.
    Because the machine output is symmetric under exchanging qubits 1 and 2,
    this pipeline measures the same replicas as the plain network.
    """
    if prep_angles is None:
        prep_angles = cloner_prep_angles()
    t1, t2, t3 = prep_angles.as_tuple()
    return Circuit(
        (1, 2, 3, AUX),
        (
            SWAP(1, 2),
            Rotation(1, t1),
            CNOT(1, 3),
            Rotation(3, t2),
            CNOT(3, 1),
            Rotation(1, t3),
            CNOT(2, 1),
            CNOT(2, 3),
            CNOT(1, 2),
            CNOT(3, 2),
            Rotation(AUX, math.pi / 4),
            CSWAP(AUX, 1, 2),
        ),
    )

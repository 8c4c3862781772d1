"""Gate library and circuits over labeled qubits.

The rotation convention is R(t)|0> = cos t |0> + sin t |1> and
R(t)|1> = -sin t |0> + cos t |1>.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .hilbert import LabelError, PureState, canonical_labels


@dataclass(frozen=True)
class Rotation:
    target: object
    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ValueError(f"rotation angle must be finite, got {self.angle!r}")

    @property
    def labels(self):
        return (self.target,)


@dataclass(frozen=True)
class CNOT:
    control: object
    target: object

    def __post_init__(self):
        if self.control == self.target:
            raise LabelError("CNOT control and target must differ")

    @property
    def labels(self):
        return (self.control, self.target)


@dataclass(frozen=True)
class SWAP:
    a: object
    b: object

    def __post_init__(self):
        if self.a == self.b:
            raise LabelError("SWAP qubits must differ")

    @property
    def labels(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class CSWAP:
    control: object
    a: object
    b: object

    def __post_init__(self):
        if len({self.control, self.a, self.b}) != 3:
            raise LabelError("CSWAP qubits must be distinct")

    @property
    def labels(self):
        return (self.control, self.a, self.b)


Gate = Union[Rotation, CNOT, SWAP, CSWAP]


def rotation_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]], dtype=complex)


class Circuit:
    """Ordered gate list over a fixed register of labeled qubits."""

    def __init__(self, register, gates=()):
        self._register = canonical_labels(register)
        gates = tuple(gates)
        reg = set(self._register)
        for g in gates:
            bad = set(g.labels) - reg
            if bad:
                raise LabelError(
                    f"gate {g!r} touches qubits outside the register: {sorted(map(str, bad))}"
                )
        self._gates = gates

    @property
    def register(self) -> tuple:
        return self._register

    @property
    def gates(self) -> tuple:
        return self._gates

    def extended(self, more_gates) -> "Circuit":
        return Circuit(self._register, self._gates + tuple(more_gates))

    def __repr__(self):
        return f"Circuit(register={self._register!r}, gates={self._gates!r})"


def _bit_weight(register: tuple, label) -> int:
    # Canonical order: first label is the most significant bit.
    pos = register.index(label)
    return 1 << (len(register) - 1 - pos)


def gate_unitary(gate: Gate, register) -> np.ndarray:
    """Full 2^n x 2^n unitary of `gate` embedded in the given register."""
    register = canonical_labels(register)
    reg = set(register)
    bad = set(gate.labels) - reg
    if bad:
        raise LabelError(f"gate qubits not in register: {sorted(map(str, bad))}")
    n = len(register)
    dim = 1 << n

    if isinstance(gate, Rotation):
        u = np.eye(1, dtype=complex)
        r = rotation_matrix(gate.angle)
        for lab in register:
            u = np.kron(u, r if lab == gate.target else np.eye(2, dtype=complex))
        return u

    # The remaining gates permute computational basis states.
    u = np.zeros((dim, dim), dtype=complex)
    if isinstance(gate, CNOT):
        cbit = _bit_weight(register, gate.control)
        tbit = _bit_weight(register, gate.target)
        for i in range(dim):
            j = i ^ tbit if i & cbit else i
            u[j, i] = 1.0
    elif isinstance(gate, SWAP):
        abit = _bit_weight(register, gate.a)
        bbit = _bit_weight(register, gate.b)
        for i in range(dim):
            j = i
            if bool(i & abit) != bool(i & bbit):
                j = i ^ abit ^ bbit
            u[j, i] = 1.0
    elif isinstance(gate, CSWAP):
        cbit = _bit_weight(register, gate.control)
        abit = _bit_weight(register, gate.a)
        bbit = _bit_weight(register, gate.b)
        for i in range(dim):
            j = i
            if i & cbit and bool(i & abit) != bool(i & bbit):
                j = i ^ abit ^ bbit
            u[j, i] = 1.0
    else:
        raise TypeError(f"unknown gate type: {gate!r}")
    return u


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Composite unitary of the whole circuit."""
    dim = 1 << len(circuit.register)
    u = np.eye(dim, dtype=complex)
    for g in circuit.gates:
        u = gate_unitary(g, circuit.register) @ u
    return u


def apply_circuit(circuit: Circuit, state: PureState) -> PureState:
    """Apply the circuit's gates in order to the state."""
    if state.labels != circuit.register:
        raise LabelError(
            f"state register {state.labels!r} does not match circuit register "
            f"{circuit.register!r}"
        )
    amps = state.amplitudes
    for g in circuit.gates:
        amps = gate_unitary(g, circuit.register) @ amps
    return PureState(circuit.register, amps)

"""Complex linear algebra over labeled multi-qubit registers.

States and density matrices carry explicit qubit labels instead of bare
positions. The basis ordering is a pure function of the labels: the
auxiliary qubit ("aux"), when present, is the most significant bit of the
basis index, followed by the numbered qubits in ascending order (smallest
label = most significant remaining bit). All values are immutable after
construction and every operation is a pure function.
"""

from __future__ import annotations

import numpy as np

AUX = "aux"

# Default absolute tolerance for equality checks (norm, trace, Hermiticity).
ATOL = 1e-12
# Eigenvalue floor for positivity checks; absorbs floating-point roundoff.
PSD_FLOOR = -1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


class LabelError(ValueError):
    """Unknown, duplicate, or overlapping qubit labels."""


def label_key(label):
    """Sort key placing "aux" first (most significant), then numbered qubits."""
    if label == AUX:
        return (0, 0)
    return (1, int(label))


def canonical_labels(labels) -> tuple:
    """Validate labels and return them in canonical (basis) order."""
    seq = tuple(labels)
    if not seq:
        raise LabelError("register needs at least one qubit label")
    if len(set(seq)) != len(seq):
        raise LabelError(f"duplicate qubit labels: {seq!r}")
    for lab in seq:
        if lab != AUX and not isinstance(lab, (int, np.integer)):
            raise LabelError(f"invalid qubit label: {lab!r}")
    return tuple(sorted(seq, key=label_key))


def _permute_to_canonical(amps: np.ndarray, given: tuple, canon: tuple) -> np.ndarray:
    n = len(canon)
    perm = [given.index(lab) for lab in canon]
    return amps.reshape((2,) * n).transpose(perm).reshape(-1)


class PureState:
    """Normalized pure state over labeled qubits.

    Amplitudes are stored in canonical basis order regardless of the label
    order passed to the constructor.
    """

    def __init__(self, labels, amplitudes):
        given = tuple(labels)
        canon = canonical_labels(given)
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(canon):
            raise ValueError(
                f"amplitude vector has length {amps.size}, expected {2 ** len(canon)}"
            )
        if given != canon:
            amps = _permute_to_canonical(amps, given, canon)
        nrm2 = float(np.sum(np.abs(amps) ** 2))
        if abs(nrm2 - 1.0) > ATOL:
            raise ValueError(f"state is not normalized: sum |a|^2 = {nrm2!r}")
        amps = amps.copy()
        amps.flags.writeable = False
        self._labels = canon
        self._amps = amps

    @property
    def labels(self) -> tuple:
        return self._labels

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def n_qubits(self) -> int:
        return len(self._labels)

    @property
    def dim(self) -> int:
        return self._amps.size

    def inner(self, other: "PureState") -> complex:
        """<self|other> for states on the same register."""
        if self._labels != other._labels:
            raise LabelError(
                f"register mismatch: {self._labels!r} vs {other._labels!r}"
            )
        return complex(np.vdot(self._amps, other._amps))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self._labels, np.outer(self._amps, self._amps.conj()))

    def equal_up_to_global_phase(self, other: "PureState", tol: float = 1e-10) -> bool:
        """True when |<self|other>| >= 1 - tol."""
        return abs(self.inner(other)) >= 1.0 - tol

    def __repr__(self):
        return f"PureState(labels={self._labels!r}, amplitudes={self._amps!r})"


class DensityMatrix:
    """Hermitian, positive semidefinite, trace-one matrix over labeled qubits."""

    def __init__(self, labels, matrix):
        given = tuple(labels)
        canon = canonical_labels(given)
        mat = np.asarray(matrix, dtype=complex)
        d = 2 ** len(canon)
        if mat.shape != (d, d):
            raise ValueError(f"matrix has shape {mat.shape}, expected {(d, d)}")
        if given != canon:
            n = len(canon)
            perm = [given.index(lab) for lab in canon]
            full = perm + [p + n for p in perm]
            mat = mat.reshape((2,) * (2 * n)).transpose(full).reshape(d, d)
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        tr = complex(np.trace(mat))
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"matrix trace is {tr!r}, expected 1")
        if float(np.min(np.linalg.eigvalsh(mat))) < PSD_FLOOR:
            raise ValueError("matrix has an eigenvalue below the positivity floor")
        mat = mat.copy()
        mat.flags.writeable = False
        self._labels = canon
        self._matrix = mat

    @classmethod
    def from_pure(cls, psi: PureState) -> "DensityMatrix":
        return psi.density()

    @property
    def labels(self) -> tuple:
        return self._labels

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n_qubits(self) -> int:
        return len(self._labels)

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    def __repr__(self):
        return f"DensityMatrix(labels={self._labels!r}, matrix={self._matrix!r})"


def tensor_product(a: PureState, b: PureState) -> PureState:
    """Combined state on the union register; label sets must be disjoint."""
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise LabelError(f"overlapping qubit labels: {sorted(map(str, overlap))}")
    return PureState(a.labels + b.labels, np.kron(a.amplitudes, b.amplitudes))


def partial_trace(rho, keep) -> DensityMatrix:
    """Reduced density matrix on the `keep` labels.

    Accepts a DensityMatrix or a PureState (converted internally).
    """
    if isinstance(rho, PureState):
        rho = rho.density()
    keep = tuple(keep) if not isinstance(keep, (int, str)) else (keep,)
    keep_canon = canonical_labels(keep)
    missing = set(keep_canon) - set(rho.labels)
    if missing:
        raise LabelError(f"labels not in register: {sorted(map(str, missing))}")
    n = rho.n_qubits
    if keep_canon == rho.labels:
        return DensityMatrix(rho.labels, rho.matrix)
    keep_pos = [rho.labels.index(lab) for lab in keep_canon]
    trace_pos = [p for p in range(n) if p not in keep_pos]
    k, t = len(keep_pos), len(trace_pos)
    tensor = rho.matrix.reshape((2,) * (2 * n))
    order = keep_pos + trace_pos + [p + n for p in keep_pos] + [p + n for p in trace_pos]
    tensor = tensor.transpose(order).reshape(2 ** k, 2 ** t, 2 ** k, 2 ** t)
    reduced = np.einsum("imjm->ij", tensor)
    return DensityMatrix(keep_canon, reduced)


def fidelity(psi: PureState, rho) -> float:
    """Overlap <psi|rho|psi> of a pure state with a density matrix."""
    if isinstance(rho, PureState):
        rho = rho.density()
    if psi.labels != rho.labels:
        raise LabelError(f"register mismatch: {psi.labels!r} vs {rho.labels!r}")
    value = complex(psi.amplitudes.conj() @ rho.matrix @ psi.amplitudes)
    if abs(value.imag) > ATOL:
        raise ValueError(f"fidelity has a nonreal value: {value!r}")
    return float(value.real)


def stokes_decompose(rho: DensityMatrix) -> tuple:
    """Stokes components (s_x, s_y, s_z) of a single-qubit density matrix.

    Defined by rho = (I + s_x X + s_y Y + s_z Z) / 2.
    """
    if rho.n_qubits != 1:
        raise ValueError(f"expected a single-qubit matrix, got {rho.n_qubits} qubits")
    m = rho.matrix
    sx = float(np.real(np.trace(m @ PAULI_X)))
    sy = float(np.real(np.trace(m @ PAULI_Y)))
    sz = float(np.real(np.trace(m @ PAULI_Z)))
    return sx, sy, sz


def stokes_compose(sx: float, sy: float, sz: float, label=1) -> DensityMatrix:
    """Single-qubit density matrix with the given Stokes components."""
    m = 0.5 * (np.eye(2, dtype=complex) + sx * PAULI_X + sy * PAULI_Y + sz * PAULI_Z)
    return DensityMatrix([label], m)


def random_pure_state(labels, rng: np.random.Generator) -> PureState:
    """Haar-style random pure state on the given register (for checks and tests)."""
    canon = canonical_labels(labels)
    d = 2 ** len(canon)
    amps = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState(canon, amps / np.linalg.norm(amps))

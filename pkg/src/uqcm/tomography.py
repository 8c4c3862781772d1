"""Replica verification: probe qubit, path distributions, photon counting,
and density-matrix reconstruction by linear inversion.

A probe qubit prepared in (|0> + |1>)/sqrt(2) controls a swap of the two
replicas, so the eight detector paths split into two groups: paths 0-3
(probe 0) carry replica 1 on the polarization qubit and paths 4-7 (probe 1)
carry replica 2, swapped onto polarization. Each path's polarization is
measured in the four linearly independent settings

    H = |0>,  V = |1>,  D = (|0> + |1>)/sqrt(2),  R = (|0> + i|1>)/sqrt(2)

and the single-qubit inversion uses, with n = C_H + C_V,

    s_z = (C_H - C_V) / n,   s_x = 2 C_D / n - 1,   s_y = 2 C_R / n - 1,
    rho = (I + s_x X + s_y Y + s_z Z) / 2.

Finite counts can land outside the physical set; the reconstruction then
shortens the Stokes vector to unit length, which for a trace-one qubit
matrix is the same projection as clipping negative eigenvalues to zero and
renormalizing (and is idempotent and trace-preserving).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .gates import CSWAP, Circuit, apply_circuit
from .hilbert import (
    AUX,
    DensityMatrix,
    PureState,
    fidelity,
    stokes_compose,
    tensor_product,
)
from .network import clone, input_state

BASES = ("H", "V", "D", "R")

_SQ2 = 1.0 / math.sqrt(2.0)
BASIS_VECTORS = {
    "H": np.array([1.0, 0.0], dtype=complex),
    "V": np.array([0.0, 1.0], dtype=complex),
    "D": np.array([_SQ2, _SQ2], dtype=complex),
    "R": np.array([_SQ2, 1.0j * _SQ2], dtype=complex),
}
_ORTHOGONAL = {
    "H": np.array([0.0, 1.0], dtype=complex),
    "V": np.array([1.0, 0.0], dtype=complex),
    "D": np.array([_SQ2, -_SQ2], dtype=complex),
    "R": np.array([_SQ2, -1.0j * _SQ2], dtype=complex),
}

N_PATHS = 8

# Salt for deriving the bootstrap stream from a record's seed.
_BOOTSTRAP_SALT = 0x626F6F74


class ReconstructionError(ValueError):
    """Counts are insufficient to invert a density matrix."""


@dataclass(frozen=True)
class DetectorModel:
    """Single-photon counting module parameters.

    Defaults follow the bench hardware: 70% efficiency, 50 dark events per
    second, detection rates capped at 20000 per second, and a 5 ns gate
    (the bench passage time). The rate cap is carried as metadata; timing
    is not simulated.
    """

    efficiency: float = 0.70
    dark_rate: float = 50.0
    max_rate: float = 20000.0
    gate_window: float = 5e-9

    def __post_init__(self):
        if not (0.0 <= self.efficiency <= 1.0):
            raise ValueError(f"efficiency {self.efficiency!r} outside [0, 1]")
        if self.dark_rate < 0 or self.max_rate <= 0 or self.gate_window < 0:
            raise ValueError("rates and gate window must be nonnegative (max_rate positive)")

    def dark_mean(self, trials: int) -> float:
        """Expected dark counts per (path, basis) cell for a `trials` run."""
        return self.dark_rate * self.gate_window * trials / self.max_rate


@dataclass(frozen=True)
class CountsRecord:
    """Simulated detector counts, indexed [path 0..7][basis H, V, D, R]."""

    counts: np.ndarray
    total_trials: int
    seed: int
    model: DetectorModel = DetectorModel()

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (N_PATHS, len(BASES)):
            raise ValueError(f"counts must have shape (8, 4), got {counts.shape}")
        if counts.min() < 0 or counts.max() > self.total_trials:
            raise ValueError("counts must lie in [0, total_trials]")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)

    def to_text(self) -> str:
        m = self.model
        header = (
            f"# trials={self.total_trials} seed={self.seed} "
            f"efficiency={m.efficiency!r} dark_rate={m.dark_rate!r} "
            f"max_rate={m.max_rate!r} gate_window={m.gate_window!r}"
        )
        lines = [header]
        for path in range(N_PATHS):
            for b, basis in enumerate(BASES):
                lines.append(f"{path} {basis} {int(self.counts[path, b])}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CountsRecord":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("#"):
            raise ValueError("missing counts header line")
        fields = dict(item.split("=", 1) for item in lines[0][1:].split())
        counts = np.zeros((N_PATHS, len(BASES)), dtype=np.int64)
        for ln in lines[1:]:
            path, basis, value = ln.split()
            counts[int(path), BASES.index(basis)] = int(value)
        model = DetectorModel(
            efficiency=float(fields["efficiency"]),
            dark_rate=float(fields["dark_rate"]),
            max_rate=float(fields["max_rate"]),
            gate_window=float(fields["gate_window"]),
        )
        return cls(
            counts=counts,
            total_trials=int(fields["trials"]),
            seed=int(fields["seed"]),
            model=model,
        )


def attach_aux_cswap(out3: PureState) -> PureState:
    """Attach the probe qubit and apply the probe-controlled replica swap.

    Maps the three-qubit machine output to
    (|0>_aux |psi_123> + |1>_aux |psi_213>) / sqrt(2).
    """
    if out3.labels != (1, 2, 3):
        raise ValueError(f"expected a state on qubits (1, 2, 3), got {out3.labels!r}")
    probe = PureState([AUX], [_SQ2, _SQ2])
    joint = tensor_product(probe, out3)
    return apply_circuit(Circuit((1, 2, 3, AUX), (CSWAP(AUX, 1, 2),)), joint)


def measurement_state(theta: float, delta: float) -> PureState:
    """Gate-tier four-qubit state entering the detectors."""
    return attach_aux_cswap(clone(theta, delta).output)


def per_path_amplitudes(meas: PureState) -> np.ndarray:
    """(8, 2) array of unnormalized polarization amplitudes per detector path.

    The path index bits are (probe, q2, q3); column 0 is H, column 1 is V.
    """
    if meas.labels != (AUX, 1, 2, 3):
        raise ValueError(f"expected a state on (aux, 1, 2, 3), got {meas.labels!r}")
    # Canonical amplitude index is probe*8 + q1*4 + q2*2 + q3; regroup so the
    # polarization bit becomes the trailing axis.
    return meas.amplitudes.reshape(2, 2, 4).transpose(0, 2, 1).reshape(8, 2)


def path_distribution(meas: PureState, basis: str) -> np.ndarray:
    """(8, 2) outcome probabilities for one polarizer setting.

    Column 0 projects onto the basis state, column 1 onto its orthogonal
    complement; the 16 entries sum to one.
    """
    if basis not in BASES:
        raise ValueError(f"unknown basis {basis!r}; expected one of {BASES}")
    rows = per_path_amplitudes(meas)
    plus = np.abs(rows @ BASIS_VECTORS[basis].conj()) ** 2
    minus = np.abs(rows @ _ORTHOGONAL[basis].conj()) ** 2
    return np.stack([plus, minus], axis=1)


def signal_probabilities(meas: PureState) -> np.ndarray:
    """(8, 4) probability of a click behind the polarizer per (path, basis)."""
    return np.stack([path_distribution(meas, b)[:, 0] for b in BASES], axis=1)


def simulate_counts(
    signal_probs: np.ndarray,
    model: DetectorModel,
    trials: int,
    seed: int,
) -> CountsRecord:
    """Simulate photon counting for all four polarizer settings.

    Per setting, `trials` emitted photons distribute multinomially over the
    eight detectors and an absorbed remainder, so each (path, basis) cell is
    marginally Binomial(trials, p * efficiency); a single photon can only
    fire one detector, which anticorrelates the path counts. Poisson dark
    counts with mean dark_rate * gate_window * trials / max_rate are added
    per cell, capped at `trials`. Each basis setting consumes its own
    substream derived from (seed, basis index), so settings may be simulated
    in parallel without changing the result.
    """
    probs = np.asarray(signal_probs, dtype=float)
    if probs.shape != (N_PATHS, len(BASES)):
        raise ValueError(f"signal_probs must have shape (8, 4), got {probs.shape}")
    if probs.min() < -1e-12 or probs.max() > 1.0 + 1e-12:
        raise ValueError("signal probabilities must lie in [0, 1]")
    if trials < 1:
        raise ValueError("trials must be positive")
    probs = np.clip(probs, 0.0, 1.0)
    dark_mean = model.dark_mean(trials)
    counts = np.zeros((N_PATHS, len(BASES)), dtype=np.int64)
    for b in range(len(BASES)):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, b))))
        detect = probs[:, b] * model.efficiency
        pvals = np.append(detect, max(0.0, 1.0 - float(detect.sum())))
        signal = rng.multinomial(trials, pvals / pvals.sum())[:N_PATHS]
        dark = rng.poisson(dark_mean, size=N_PATHS)
        counts[:, b] = np.minimum(signal + dark, trials)
    return CountsRecord(counts=counts, total_trials=trials, seed=seed, model=model)


def reconstruct_single_qubit(c_h, c_v, c_d, c_r, label=1) -> DensityMatrix:
    """Linear-inversion reconstruction from one path's four settings.

    Accepts integer counts or exact (float) probabilities; the formulas are
    scale-invariant as long as all four share one scale.
    """
    total = c_h + c_v
    if total <= 0:
        raise ReconstructionError("no H/V counts: cannot normalize the inversion")
    sz = (c_h - c_v) / total
    sx = 2.0 * c_d / total - 1.0
    sy = 2.0 * c_r / total - 1.0
    s = np.array([sx, sy, sz])
    slen = float(np.linalg.norm(s))
    if slen > 1.0:
        s = s / slen
    return stokes_compose(s[0], s[1], s[2], label=label)


def _counts_array(counts) -> np.ndarray:
    if isinstance(counts, CountsRecord):
        return np.asarray(counts.counts, dtype=float)
    arr = np.asarray(counts, dtype=float)
    if arr.shape != (N_PATHS, len(BASES)):
        raise ValueError(f"counts must have shape (8, 4), got {arr.shape}")
    return arr


def reconstruct_replica(counts, which: int) -> DensityMatrix:
    """Weighted per-path reconstruction of one replica.

    Replica 1 uses paths 0-3 (probe 0), replica 2 uses paths 4-7 (probe 1).
    Path weights are the relative H+V counts, the per-setting totals that
    estimate each path's photon flux; D and R settings re-measure the same
    flux and would bias the weights.
    """
    if which not in (1, 2):
        raise ValueError(f"replica selector must be 1 or 2, got {which!r}")
    arr = _counts_array(counts)
    group = arr[0:4] if which == 1 else arr[4:8]
    weights = group[:, 0] + group[:, 1]
    total = float(weights.sum())
    if total <= 0:
        raise ReconstructionError(f"replica {which}: no counts in its path group")
    acc = np.zeros((2, 2), dtype=complex)
    for i in range(4):
        if weights[i] <= 0:
            continue
        rho_i = reconstruct_single_qubit(group[i, 0], group[i, 1], group[i, 2], group[i, 3])
        acc += (weights[i] / total) * rho_i.matrix
    return DensityMatrix([1], acc)


def replicas_from_state(meas: PureState) -> tuple:
    """Exact-probability reconstruction of both replicas (the noise-free pipeline)."""
    probs = signal_probabilities(meas)
    return reconstruct_replica(probs, 1), reconstruct_replica(probs, 2)


@dataclass(frozen=True)
class FidelityReport:
    """Replica fidelities against the input state, with count statistics."""

    fidelity1: float
    fidelity2: float
    stderr1: float
    stderr2: float
    theta: float
    delta: float
    mode: str

    def __post_init__(self):
        for name in ("fidelity1", "fidelity2"):
            f = getattr(self, name)
            if not (-1e-12 <= f <= 1.0 + 1e-12):
                raise ValueError(f"{name}={f!r} outside [0, 1]")
        if self.stderr1 < 0 or self.stderr2 < 0:
            raise ValueError("standard errors must be nonnegative")
        if self.mode not in ("exact", "montecarlo", "perturbed"):
            raise ValueError(f"unknown mode {self.mode!r}")


def _replica_fidelities(rho1: DensityMatrix, rho2: DensityMatrix, psi: PureState) -> tuple:
    f1 = fidelity(psi, DensityMatrix([1], rho1.matrix))
    f2 = fidelity(psi, DensityMatrix([1], rho2.matrix))
    return f1, f2


def fidelity_report(
    rho1: DensityMatrix,
    rho2: DensityMatrix,
    theta: float,
    delta: float,
    mode: str = "exact",
    counts: Union[CountsRecord, None] = None,
    n_bootstrap: int = 50,
) -> FidelityReport:
    """Fidelities of both replicas against the (theta, delta) input state.

    When a CountsRecord is supplied, statistical error bars are estimated by
    a parametric bootstrap: each cell is resampled as Binomial(trials,
    observed fraction) `n_bootstrap` times and the sample standard deviation
    of the refitted fidelities is reported.
    """
    psi = input_state(theta, delta)
    f1, f2 = _replica_fidelities(rho1, rho2, psi)
    err1 = err2 = 0.0
    if counts is not None:
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((counts.seed, _BOOTSTRAP_SALT)))
        )
        trials = counts.total_trials
        fractions = np.asarray(counts.counts, dtype=float) / trials
        f1s, f2s = [], []
        for _ in range(n_bootstrap):
            resampled = rng.binomial(trials, fractions)
            b1 = reconstruct_replica(resampled, 1)
            b2 = reconstruct_replica(resampled, 2)
            g1, g2 = _replica_fidelities(b1, b2, psi)
            f1s.append(g1)
            f2s.append(g2)
        err1 = float(np.std(f1s, ddof=1))
        err2 = float(np.std(f2s, ddof=1))
    return FidelityReport(
        fidelity1=f1,
        fidelity2=f2,
        stderr1=err1,
        stderr2=err2,
        theta=theta,
        delta=delta,
        mode=mode,
    )


def exact_report(theta: float, delta: float) -> FidelityReport:
    """Noise-free pipeline: exact probabilities through the full reconstruction."""
    rho1, rho2 = replicas_from_state(measurement_state(theta, delta))
    return fidelity_report(rho1, rho2, theta, delta, mode="exact")


def montecarlo_report(
    theta: float,
    delta: float,
    trials: int,
    seed: int,
    model: DetectorModel = DetectorModel(),
    n_bootstrap: int = 50,
) -> FidelityReport:
    """Counting-statistics pipeline: simulate counts, reconstruct, bootstrap errors."""
    record = simulate_counts(
        signal_probabilities(measurement_state(theta, delta)), model, trials, seed
    )
    rho1 = reconstruct_replica(record, 1)
    rho2 = reconstruct_replica(record, 2)
    return fidelity_report(
        rho1, rho2, theta, delta, mode="montecarlo", counts=record, n_bootstrap=n_bootstrap
    )

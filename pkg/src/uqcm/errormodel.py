"""Fidelity error budget: analytic bound and empirical perturbation sweeps.

The bench's fidelity error has two dominant sources: oscillation of the
per-path relative counts (Delta C_i, four paths of the first replica group)
and the orientation precision of the waveplates and polarizers (Delta
theta). The analytic upper bound combines them as

    Delta F = sum_i Delta C_i + (3/2) Delta theta.

The empirical side perturbs every mounted axis angle of the optical train
independently and reruns the exact pipeline; samples exceeding a supplied
bound are counted rather than silently accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hilbert import DensityMatrix, fidelity
from .network import input_state, optimal_fidelity
from .optics import ORIENTED_ELEMENTS, OpticalTrain, build_cloner_train, optical_measurement_state
from .tomography import reconstruct_replica, signal_probabilities

_TARGET_F = optimal_fidelity(1, 2)


@dataclass(frozen=True)
class ErrorBudget:
    """Relative count oscillations per replica-1 path and orientation precision."""

    delta_c: tuple
    delta_theta: float

    def __post_init__(self):
        dc = tuple(float(x) for x in self.delta_c)
        if len(dc) != 4:
            raise ValueError(f"delta_c needs 4 entries, got {len(dc)}")
        if any(x < 0 for x in dc) or self.delta_theta < 0:
            raise ValueError("error budget entries must be nonnegative")
        object.__setattr__(self, "delta_c", dc)


def fidelity_error_bound(budget: ErrorBudget) -> float:
    """Upper bound on |Delta F|: sum of count oscillations plus 1.5 * Delta theta."""
    return float(sum(budget.delta_c) + 1.5 * budget.delta_theta)


@dataclass(frozen=True)
class PerturbationResult:
    """Empirical |Delta F| distribution from an angle-jitter sweep."""

    jitter: float
    delta_c_total: float
    n_samples: int
    seed: int
    deviations: np.ndarray
    fidelities1: np.ndarray
    fidelities2: np.ndarray
    bound: float | None = None

    def __post_init__(self):
        for name in ("deviations", "fidelities1", "fidelities2"):
            arr = np.asarray(getattr(self, name), dtype=float).copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def min_deviation(self) -> float:
        return float(self.deviations.min())

    @property
    def mean_deviation(self) -> float:
        return float(self.deviations.mean())

    @property
    def max_deviation(self) -> float:
        return float(self.deviations.max())

    @property
    def n_exceeding_bound(self):
        if self.bound is None:
            return None
        return int(np.sum(self.deviations > self.bound))


def _perturbed_train(base: OpticalTrain, jitter: float, rng: np.random.Generator) -> OpticalTrain:
    """Independently jitter every mounted axis angle by uniform(-jitter, +jitter)."""
    elements = []
    for e in base.elements:
        if isinstance(e, ORIENTED_ELEMENTS):
            elements.append(replace(e, angle=e.angle + rng.uniform(-jitter, jitter)))
        else:
            elements.append(e)
    return OpticalTrain(base.space, elements)


def perturbation_sweep(
    jitter: float,
    n_samples: int,
    seed: int,
    theta: float = 0.0,
    delta: float = 0.0,
    delta_c_total: float = 0.0,
    bound: float | None = None,
) -> PerturbationResult:
    """Rerun the exact optical pipeline under waveplate/polarizer angle jitter.

    Each sample draws an independent uniform(-jitter, +jitter) offset for
    every axis-mounted element of the bench for input (theta, delta), adds
    the optional count-oscillation injection (the four replica-1 path
    weights are scaled by 1 + u_i with sum |u_i| = delta_c_total), and
    records |F - 5/6| of replica 1. Deterministic given the seed; samples
    use independent substreams and may run in parallel.
    """
    if jitter < 0:
        raise ValueError("jitter must be nonnegative")
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if delta_c_total < 0:
        raise ValueError("delta_c_total must be nonnegative")
    base = build_cloner_train(theta, delta)
    psi = input_state(theta, delta)
    devs = np.empty(n_samples)
    f1s = np.empty(n_samples)
    f2s = np.empty(n_samples)
    for i in range(n_samples):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, i))))
        train = _perturbed_train(base, jitter, rng)
        probs = signal_probabilities(optical_measurement_state(theta, delta, train=train))
        if delta_c_total > 0.0:
            u = rng.uniform(-1.0, 1.0, size=4)
            norm = float(np.abs(u).sum())
            if norm > 0.0:
                probs = probs.copy()
                probs[0:4] *= (1.0 + u * (delta_c_total / norm))[:, None]
        rho1 = reconstruct_replica(probs, 1)
        rho2 = reconstruct_replica(probs, 2)
        f1s[i] = fidelity(psi, DensityMatrix([1], rho1.matrix))
        f2s[i] = fidelity(psi, DensityMatrix([1], rho2.matrix))
        devs[i] = abs(f1s[i] - _TARGET_F)
    return PerturbationResult(
        jitter=jitter,
        delta_c_total=delta_c_total,
        n_samples=n_samples,
        seed=seed,
        deviations=devs,
        fidelities1=f1s,
        fidelities2=f2s,
        bound=bound,
    )

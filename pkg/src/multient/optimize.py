"""Projected gradient ascent of the worst-case M over the unit sphere.

The nonsmooth target ``min_k M_k`` is replaced by the soft minimum

    S_beta = -(1/beta) log( (1/K) sum_k exp(-beta M_k) )

which equals the common value when all ``M_k`` agree and tends to the true
minimum as ``beta`` grows. The ascent works on the real embedding of the
amplitude vector and renormalizes after every step.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.special import logsumexp

from .detect import max_m
from .errors import DimensionTooLarge
from .statespace import (
    AmplitudeTensor,
    Bipartition,
    enumerate_bipartitions,
    make_state,
    matricize_array,
    random_state,
    single_part_bipartitions,
    state_to_dict,
    unmatricize,
)

MAX_TOTAL_DIM = 4096
ARMIJO = 0.25

BipartitionSet = Literal["all", "single_part_only"]


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 400
    step_init: float = 0.5
    smoothing_beta: float = 10.0
    beta_growth: float = 2.0
    n_phases: int = 4
    tol_grad: float = 1e-6
    seed: int = 0
    bipartition_set: BipartitionSet = "all"
    workers: int = 1

    def __post_init__(self):
        for name in ("restarts", "max_iters", "n_phases", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("step_init", "smoothing_beta", "beta_growth", "tol_grad"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.bipartition_set not in ("all", "single_part_only"):
            raise ValueError(f"unknown bipartition_set {self.bipartition_set!r}")


@dataclass(frozen=True, eq=False)
class OptResult:
    best_state: AmplitudeTensor
    best_min_m: float
    per_bipartition_m: tuple[float, ...]
    bipartitions: tuple[Bipartition, ...]
    iterations_used: int
    converged: bool
    restart_index: int
    restarts_converged: int = 0
    final_grad_norm: float = float("nan")
    restart_min_m: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "state": state_to_dict(self.best_state),
            "best_min_m": self.best_min_m,
            "bipartitions": [
                {"left": list(bp.left), "right": list(bp.right), "m": m}
                for bp, m in zip(self.bipartitions, self.per_bipartition_m)
            ],
            "iterations_used": self.iterations_used,
            "converged": self.converged,
            "restart_index": self.restart_index,
            "restarts_converged": self.restarts_converged,
            "final_grad_norm": self.final_grad_norm,
            "restart_min_m": list(self.restart_min_m),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def select_bipartitions(n_parts: int, which: BipartitionSet = "all") -> list[Bipartition]:
    if which == "all":
        return enumerate_bipartitions(n_parts)
    if which == "single_part_only":
        return single_part_bipartitions(n_parts)
    raise ValueError(f"unknown bipartition selection {which!r}")


def _m_values(tensor: np.ndarray, bps: Sequence[Bipartition]) -> np.ndarray:
    out = np.empty(len(bps))
    for k, bp in enumerate(bps):
        a = matricize_array(tensor, bp)
        g = a @ a.conj().T if a.shape[0] <= a.shape[1] else a.conj().T @ a
        out[k] = 2.0 * (1.0 - np.sum(g.real**2 + g.imag**2))
    return out


def _soft_min(ms: np.ndarray, beta: float) -> float:
    return float(-(logsumexp(-beta * ms) - math.log(len(ms))) / beta)


def _value_and_grad(amps: np.ndarray, dims, bps, beta: float) -> tuple[float, np.ndarray]:
    """Soft-min value and its Euclidean gradient in complex form.

    For a real function ``F`` of ``a`` the returned ``g`` satisfies
    ``dF = Re <g, da>``. Each ``M = 2 (1 - Tr (A A^dagger)^2)`` contributes
    ``-8 A A^dagger A``.
    """
    tensor = amps.reshape(dims)
    ms = np.empty(len(bps))
    grads = []
    for k, bp in enumerate(bps):
        a = matricize_array(tensor, bp)
        if a.shape[0] <= a.shape[1]:
            g = a @ a.conj().T
            ga = g @ a
        else:
            g = a.conj().T @ a
            ga = a @ g
        ms[k] = 2.0 * (1.0 - np.sum(g.real**2 + g.imag**2))
        grads.append(unmatricize(-8.0 * ga, dims, bp))
    weights = np.exp(-beta * ms - logsumexp(-beta * ms))
    grad = sum(w * gk for w, gk in zip(weights, grads))
    return _soft_min(ms, beta), grad


def _tangent(amps: np.ndarray, grad: np.ndarray) -> np.ndarray:
    return grad - np.real(np.vdot(amps, grad)) * amps


def objective(state: AmplitudeTensor, beta: float, bp_set: BipartitionSet = "all") -> float:
    """Soft minimum of the selected M values at sharpness ``beta``."""
    bps = select_bipartitions(state.n_parts, bp_set)
    return _soft_min(_m_values(state.tensor, bps), beta)


def objective_gradient(state: AmplitudeTensor, beta: float, bp_set: BipartitionSet = "all") -> np.ndarray:
    bps = select_bipartitions(state.n_parts, bp_set)
    return _value_and_grad(state.amps, state.dims, bps, beta)[1]


def gradient_check(
    state: AmplitudeTensor,
    beta: float,
    h: float = 1e-5,
    bp_set: BipartitionSet = "all",
    n_directions: int = 20,
    seed: int = 0,
) -> float:
    """Largest discrepancy between analytic and central-difference derivatives.

    Directional derivatives are compared along ``n_directions`` random unit
    tangent directions; each discrepancy is divided by the Euclidean gradient
    norm plus ``1e-8``.
    """
    if not 1e-7 <= h <= 1e-4:
        raise ValueError(f"h must lie in [1e-7, 1e-4], got {h}")
    bps = select_bipartitions(state.n_parts, bp_set)
    dims, amps = state.dims, state.amps
    f = lambda x: _value_and_grad(x, dims, bps, beta)[0]
    _, grad = _value_and_grad(amps, dims, bps, beta)
    scale = float(np.linalg.norm(grad)) + 1e-8
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_directions):
        z = rng.standard_normal(amps.size) + 1j * rng.standard_normal(amps.size)
        z = _tangent(amps, z)
        z /= np.linalg.norm(z)
        analytic = float(np.real(np.vdot(grad, z)))
        numeric = (f(amps + h * z) - f(amps - h * z)) / (2 * h)
        worst = max(worst, abs(analytic - numeric) / scale)
    return worst


@dataclass
class _RestartOutcome:
    index: int
    amps: np.ndarray
    min_m: float
    iterations: int
    converged: bool
    grad_norm: float


IterationCallback = Callable[[int, int, float, float], None]


def _ascend(
    index: int,
    dims: tuple[int, ...],
    bps: Sequence[Bipartition],
    config: OptimizerConfig,
    callback: IterationCallback | None,
) -> _RestartOutcome:
    amps = random_state(dims, config.seed + index).amps.copy()
    phase_len = max(1, config.max_iters // config.n_phases)
    beta = config.smoothing_beta
    step = config.step_init
    it = 0
    for phase in range(config.n_phases):
        if phase:
            beta *= config.beta_growth
        last_phase = phase == config.n_phases - 1
        budget = config.max_iters - it if last_phase else phase_len
        value, grad = _value_and_grad(amps, dims, bps, beta)
        tangent = _tangent(amps, grad)
        gnorm = float(np.linalg.norm(tangent))
        for _ in range(budget):
            if gnorm <= config.tol_grad:
                break
            # backtracking line search with a sufficient-increase test
            t = step
            while True:
                trial = amps + t * tangent
                trial /= np.linalg.norm(trial)
                trial_value, trial_grad = _value_and_grad(trial, dims, bps, beta)
                if trial_value >= value + ARMIJO * t * gnorm**2:
                    break
                t *= 0.5
                if t < 1e-14:
                    trial = None
                    break
            if trial is None:
                break
            amps, value, grad = trial, trial_value, trial_grad
            tangent = _tangent(amps, grad)
            gnorm = float(np.linalg.norm(tangent))
            step = min(2.0 * t, 10.0)
            it += 1
            if callback is not None:
                callback(index, it, beta, value)
    converged = gnorm <= config.tol_grad
    min_m = float(np.min(_m_values(amps.reshape(dims), bps)))
    return _RestartOutcome(index, amps, min_m, it, converged, gnorm)


def maximize_min_m(
    dims: Sequence[int],
    config: OptimizerConfig = OptimizerConfig(),
    callback: IterationCallback | None = None,
) -> OptResult:
    """Search for the state maximizing the smallest M over the chosen cuts.

    Restart ``r`` starts from ``random_state(dims, config.seed + r)``. The
    best restart wins, ties going to the lowest index, so the result does not
    depend on ``config.workers``. ``callback(restart, iteration, beta, value)``
    is invoked after every accepted step.
    """
    dims = tuple(int(d) for d in dims)
    total = math.prod(dims)
    if total > MAX_TOTAL_DIM:
        raise DimensionTooLarge(f"total dimension {total} exceeds {MAX_TOTAL_DIM}")
    bps = select_bipartitions(len(dims), config.bipartition_set)

    run = lambda r: _ascend(r, dims, bps, config, callback)
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(run, range(config.restarts)))
    else:
        outcomes = [run(r) for r in range(config.restarts)]

    best = max(outcomes, key=lambda o: (o.min_m, -o.index))
    state = make_state(dims, best.amps, normalize=True)
    ms = _m_values(state.tensor, bps)
    return OptResult(
        best_state=state,
        best_min_m=float(np.min(ms)),
        per_bipartition_m=tuple(float(m) for m in ms),
        bipartitions=tuple(bps),
        iterations_used=best.iterations,
        converged=best.converged,
        restart_index=best.index,
        restarts_converged=sum(o.converged for o in outcomes),
        final_grad_norm=best.grad_norm,
        restart_min_m=tuple(o.min_m for o in outcomes),
    )


def bound_for(dims: Sequence[int], bps: Sequence[Bipartition]) -> float:
    """Smallest of the per-cut upper bounds ``2 (D - 1) / D``."""
    return min(max_m(dims, bp) for bp in bps)

"""Minor-based factorizability tests and the M functional family.

For a bipartition with amplitude matrix ``A`` the functional

    M^(f) = sum_{r, c, r', c'} f(A[r, c] A[r', c'] - A[r, c'] A[r', c])

runs over all ordered index tuples. It vanishes exactly when every 2x2 minor
of ``A`` vanishes, i.e. when ``A`` has rank one and the state factorizes
across the cut. With ``f = |.|^2`` it equals ``2 (1 - purity)``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonPositiveTolerance
from .schmidt import gram_purity
from .statespace import (
    AmplitudeTensor,
    Bipartition,
    enumerate_bipartitions,
    make_state,
    matricize,
)

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class MinorFunction:
    """Nonnegative ``f`` on the complex plane vanishing only at zero.

    ``eval`` must accept numpy arrays elementwise.
    """

    name: str
    eval: Callable[[np.ndarray], np.ndarray] = field(compare=False)

    def __call__(self, x):
        return self.eval(x)


def _abs2(x):
    x = np.asarray(x)
    return x.real**2 + x.imag**2


abs2 = MinorFunction("abs2", _abs2)
abs_ = MinorFunction("abs", np.abs)


def abs_p(p: float) -> MinorFunction:
    """``f(x) = |x|**p``; ``p`` must be positive."""
    p = float(p)
    if not p > 0:
        raise ValueError(f"abs_p needs p > 0, got {p}")
    return MinorFunction(f"abs_p:{p:g}", lambda x: np.abs(x) ** p)


def minor_function(name: str) -> MinorFunction:
    """Look up a built-in by registry name: ``abs2``, ``abs`` or ``abs_p:<p>``."""
    if name == "abs2":
        return abs2
    if name == "abs":
        return abs_
    match = re.fullmatch(r"abs_p:(.+)", name)
    if match:
        try:
            return abs_p(float(match.group(1)))
        except ValueError as exc:
            raise ValueError(f"bad minor function {name!r}: {exc}") from None
    raise ValueError(f"unknown minor function {name!r}; use abs2, abs or abs_p:<p>")


def minor_sum(state: AmplitudeTensor, bp: Bipartition, f: MinorFunction = abs2) -> float:
    """Sum of ``f`` over every 2x2 minor of the amplitude matrix.

    Cost is ``O((m n)^2)``; intended for total dimensions up to a few hundred.
    """
    a = matricize(state, bp)
    total = 0.0
    for r in range(a.shape[0]):
        # minors[c, r', c'] = A[r,c] A[r',c'] - A[r,c'] A[r',c]
        minors = a[r][:, None, None] * a[None, :, :] - a[r][None, None, :] * a.T[:, :, None]
        # shared row or column: zero by construction, but SIMD rounding can leave ~1e-17
        minors[:, r, :] = 0
        minors[np.arange(a.shape[1]), :, np.arange(a.shape[1])] = 0
        total += float(np.sum(f(minors)))
    return total


def m_functional(state: AmplitudeTensor, bp: Bipartition) -> float:
    """``M`` with ``f = |.|^2``, computed as ``2 (1 - purity)`` of the reduced state."""
    return max(0.0, 2.0 * (1.0 - gram_purity(matricize(state, bp))))


def max_m(state_dims: Sequence[int], bp: Bipartition) -> float:
    """Upper bound ``2 (D - 1) / D`` with ``D`` the smaller block dimension."""
    d = min(bp.block_dims(state_dims))
    return 2.0 * (d - 1) / d


def _threshold(eps: float, a_shape) -> float:
    d = min(a_shape)
    return eps * (d - 1) / d


def _check_eps(eps: float) -> None:
    if not eps > 0:
        raise NonPositiveTolerance(f"eps must be positive, got {eps}")


@dataclass(frozen=True, eq=False)
class Factorization:
    """Verdict of :func:`is_factorizable`; truthy when the state factorizes.

    ``alpha`` and ``beta`` are unit vectors over the left and right blocks
    with ``alpha (x) beta`` reproducing the state, or ``None``.
    """

    factorizable: bool
    m_value: float
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None

    def __bool__(self) -> bool:
        return self.factorizable


def is_factorizable(
    state: AmplitudeTensor, bp: Bipartition, eps: float = DEFAULT_EPS
) -> Factorization:
    """Test whether ``state`` is a product across ``bp``.

    The state counts as factorizable when ``M <= eps (D - 1) / D``. In that
    case the factors are rebuilt from a pivot entry ``a[r, c]`` of maximal
    modulus: ``alpha = A[:, c] / A[r, c]`` and ``beta = A[r, :]``, then
    rescaled to unit norm with the pivot component of ``alpha`` real positive.
    """
    _check_eps(eps)
    a = matricize(state, bp)
    m_value = max(0.0, 2.0 * (1.0 - gram_purity(a)))
    if m_value > _threshold(eps, a.shape):
        return Factorization(False, m_value)
    r, c = np.unravel_index(int(np.argmax(np.abs(a))), a.shape)
    alpha = a[:, c] / a[r, c]
    beta = a[r, :].copy()
    scale = np.linalg.norm(alpha)
    alpha = alpha / scale
    beta = beta * scale
    beta = beta / np.linalg.norm(beta)
    return Factorization(True, m_value, alpha, beta)


# -- classification ----------------------------------------------------------

FULLY_SEPARABLE = "FullySeparable"
PARTIALLY_SEPARABLE = "PartiallySeparable"
GENUINELY_ENTANGLED = "GenuinelyEntangled"


@dataclass(frozen=True)
class BipartitionResult:
    bipartition: Bipartition
    m_value: float
    factorizable: bool

    def to_dict(self) -> dict:
        return {
            "left": list(self.bipartition.left),
            "right": list(self.bipartition.right),
            "m": self.m_value,
            "factorizable": self.factorizable,
        }


@dataclass(frozen=True)
class EntanglementReport:
    """Per-bipartition M values plus the overall separability class.

    ``blocks`` is the finest product decomposition found; it is
    ``[[0], [1], ...]`` for fully separable states and a single block
    holding every subsystem for genuinely entangled ones.
    """

    per_bipartition: tuple[BipartitionResult, ...]
    separability_class: str
    blocks: tuple[tuple[int, ...], ...]
    functional: str = "abs2"

    def to_dict(self) -> dict:
        return {
            "functional": self.functional,
            "bipartitions": [r.to_dict() for r in self.per_bipartition],
            "class": self.separability_class,
            "blocks": [list(b) for b in self.blocks],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EntanglementReport":
        results = tuple(
            BipartitionResult(
                Bipartition(tuple(e["left"]), tuple(e["right"])),
                float(e["m"]),
                bool(e["factorizable"]),
            )
            for e in data["bipartitions"]
        )
        return cls(
            results,
            data["class"],
            tuple(tuple(b) for b in data["blocks"]),
            data.get("functional", "abs2"),
        )


def _finest_blocks(state: AmplitudeTensor, parts: tuple[int, ...], eps: float) -> list[tuple[int, ...]]:
    """Recursively split ``state`` (over subsystems ``parts``) along product cuts."""
    if len(parts) == 1:
        return [parts]
    for bp in enumerate_bipartitions(len(parts)):
        verdict = is_factorizable(state, bp, eps)
        if not verdict:
            continue
        out = []
        for block, vec in ((bp.left, verdict.alpha), (bp.right, verdict.beta)):
            sub_dims = [state.dims[i] for i in block]
            sub = make_state(sub_dims, vec, normalize=True)
            out.extend(_finest_blocks(sub, tuple(parts[i] for i in block), eps))
        return sorted(out)
    return [parts]


def classify(
    state: AmplitudeTensor, eps: float = DEFAULT_EPS, f: MinorFunction = abs2
) -> EntanglementReport:
    """Evaluate every canonical bipartition and classify the state.

    The verdicts always come from the ``|.|^2`` functional and the
    ``eps (D - 1) / D`` rule; ``f`` only selects which functional is reported
    in the ``m`` column (every admissible ``f`` shares the same zero set).

    Raises
    ------
    TooFewParts
        For a single-subsystem state.
    NonPositiveTolerance
    """
    _check_eps(eps)
    bps = enumerate_bipartitions(state.n_parts)
    results = []
    for bp in bps:
        verdict = is_factorizable(state, bp, eps)
        value = verdict.m_value if f.name == "abs2" else minor_sum(state, bp, f)
        results.append(BipartitionResult(bp, value, verdict.factorizable))

    if not any(r.factorizable for r in results):
        cls, blocks = GENUINELY_ENTANGLED, [tuple(range(state.n_parts))]
    else:
        blocks = _finest_blocks(state, tuple(range(state.n_parts)), eps)
        if all(len(b) == 1 for b in blocks):
            cls = FULLY_SEPARABLE
        else:
            cls = PARTIALLY_SEPARABLE
    return EntanglementReport(tuple(results), cls, tuple(blocks), f.name)

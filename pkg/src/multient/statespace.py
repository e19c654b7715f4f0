"""Pure-state amplitude tensors, bipartitions and matricization.

Amplitudes are stored flat in row-major order, last subsystem index varying
fastest, so ``amps.reshape(dims)`` gives the tensor ``a[i, j, k, ...]``.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadBipartition,
    DimensionMismatch,
    NotNormalized,
    StateFormatError,
    TooFewParts,
    ZeroState,
)

NORM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class AmplitudeTensor:
    """Normalized pure state over an ordered list of subsystems.

    Build instances with :func:`make_state`; the constructor performs no
    validation of its own.
    """

    dims: tuple[int, ...]
    amps: np.ndarray

    @property
    def n_parts(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(self.amps.size)

    @property
    def tensor(self) -> np.ndarray:
        return self.amps.reshape(self.dims)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def overlap(self, other: "AmplitudeTensor") -> complex:
        """Inner product <self|other>."""
        if tuple(other.dims) != self.dims:
            raise DimensionMismatch(f"dims {self.dims} vs {other.dims}")
        return complex(np.vdot(self.amps, other.amps))

    def fidelity(self, other: "AmplitudeTensor") -> float:
        return abs(self.overlap(other)) ** 2

    def allclose(self, other: "AmplitudeTensor", atol: float = 1e-12) -> bool:
        return self.dims == tuple(other.dims) and np.allclose(
            self.amps, other.amps, rtol=0.0, atol=atol
        )

    def __repr__(self) -> str:
        return f"AmplitudeTensor(dims={list(self.dims)}, amps={self.amps!r})"


def _check_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise DimensionMismatch("dims must be nonempty")
    if any(d < 2 for d in dims):
        raise DimensionMismatch(f"every subsystem dimension must be >= 2, got {list(dims)}")
    return dims


def make_state(dims: Sequence[int], amps, normalize: bool = False) -> AmplitudeTensor:
    """Validate amplitudes and wrap them as an :class:`AmplitudeTensor`.

    Parameters
    ----------
    dims : sequence of int
        Subsystem dimensions, each at least 2.
    amps : array_like
        Complex amplitudes, flat or already shaped as ``dims``.
    normalize : bool
        Rescale to unit norm. When false the norm must already be within
        ``1e-8`` of one.

    Raises
    ------
    DimensionMismatch, ZeroState, NotNormalized
    """
    dims = _check_dims(dims)
    arr = np.array(amps, dtype=complex).reshape(-1)
    expected = math.prod(dims)
    if arr.size != expected:
        raise DimensionMismatch(
            f"expected {expected} amplitudes for dims {list(dims)}, got {arr.size}"
        )
    norm = float(np.linalg.norm(arr))
    if norm == 0.0:
        raise ZeroState("all amplitudes are zero")
    if normalize:
        arr = arr / norm
    elif abs(norm - 1.0) > NORM_TOL:
        raise NotNormalized(f"state norm is {norm!r}, expected 1 within {NORM_TOL}")
    arr.setflags(write=False)
    return AmplitudeTensor(dims, arr)


def basis_state(dims: Sequence[int], index: Sequence[int]) -> AmplitudeTensor:
    """Computational basis state ``|index>``."""
    dims = _check_dims(dims)
    amps = np.zeros(dims, dtype=complex)
    amps[tuple(index)] = 1.0
    return make_state(dims, amps)


def random_state(dims: Sequence[int], seed: int) -> AmplitudeTensor:
    """Haar-random pure state: i.i.d. standard complex Gaussians, normalized."""
    dims = _check_dims(dims)
    rng = np.random.default_rng(seed)
    n = math.prod(dims)
    z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    return make_state(dims, z, normalize=True)


def product_state(factors: Sequence[np.ndarray]) -> AmplitudeTensor:
    """Tensor product of single-subsystem vectors (each normalized first)."""
    out = np.array([1.0 + 0j])
    for v in factors:
        v = np.asarray(v, dtype=complex)
        out = np.kron(out, v / np.linalg.norm(v))
    return make_state([len(v) for v in factors], out, normalize=True)


@dataclass(frozen=True)
class Bipartition:
    """Split of subsystems ``0..N-1`` into two blocks; ``left`` always holds 0."""

    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        left, right = tuple(self.left), tuple(self.right)
        if not left or not right:
            raise BadBipartition("both blocks must be nonempty")
        if set(left) & set(right):
            raise BadBipartition(f"blocks overlap: {left} | {right}")
        n = len(left) + len(right)
        if set(left) | set(right) != set(range(n)) or len(set(left) | set(right)) != n:
            raise BadBipartition(f"blocks must cover 0..{n - 1}: {left} | {right}")
        if 0 not in left:
            raise BadBipartition("canonical bipartitions carry index 0 in the left block")
        if list(left) != sorted(left) or list(right) != sorted(right):
            raise BadBipartition("block indices must be sorted")

    @classmethod
    def from_block(cls, block: Iterable[int], n_parts: int) -> "Bipartition":
        """Canonical bipartition separating ``block`` from its complement."""
        block = set(int(i) for i in block)
        if not block or not block <= set(range(n_parts)) or len(block) == n_parts:
            raise BadBipartition(f"invalid block {sorted(block)} for {n_parts} parts")
        rest = set(range(n_parts)) - block
        left, right = (block, rest) if 0 in block else (rest, block)
        return cls(tuple(sorted(left)), tuple(sorted(right)))

    @property
    def n_parts(self) -> int:
        return len(self.left) + len(self.right)

    def is_single_part(self) -> bool:
        return len(self.left) == 1 or len(self.right) == 1

    def block_dims(self, dims: Sequence[int]) -> tuple[int, int]:
        return (
            math.prod(dims[i] for i in self.left),
            math.prod(dims[i] for i in self.right),
        )

    def __str__(self) -> str:
        fmt = lambda b: "{" + ",".join(map(str, b)) + "}"
        return f"{fmt(self.left)}|{fmt(self.right)}"


def enumerate_bipartitions(n_parts: int) -> list[Bipartition]:
    """All ``2**(n-1) - 1`` canonical bipartitions, by left size then lexicographically."""
    if n_parts < 2:
        raise TooFewParts(f"need at least 2 subsystems, got {n_parts}")
    out = []
    others = range(1, n_parts)
    for extra in range(n_parts - 1):
        for combo in itertools.combinations(others, extra):
            left = (0,) + combo
            right = tuple(i for i in others if i not in combo)
            out.append(Bipartition(left, right))
    return out


def single_part_bipartitions(n_parts: int) -> list[Bipartition]:
    return [bp for bp in enumerate_bipartitions(n_parts) if bp.is_single_part()]


def _check_bp(n_parts: int, bp: Bipartition) -> None:
    if bp.n_parts != n_parts:
        raise BadBipartition(f"bipartition {bp} does not fit a {n_parts}-part state")


def matricize_array(tensor: np.ndarray, bp: Bipartition) -> np.ndarray:
    """Flatten an amplitude tensor of any norm into the ``left x right`` matrix."""
    dims = tensor.shape
    _check_bp(len(dims), bp)
    m, n = bp.block_dims(dims)
    return np.transpose(tensor, bp.left + bp.right).reshape(m, n)


def matricize(state: AmplitudeTensor, bp: Bipartition) -> np.ndarray:
    """Amplitude matrix of ``state`` across ``bp``.

    Rows enumerate the left block and columns the right block, each as a
    row-major composite index over the block's subsystems in increasing order.
    """
    return matricize_array(state.tensor, bp)


def unmatricize(matrix: np.ndarray, dims: Sequence[int], bp: Bipartition) -> np.ndarray:
    """Inverse of :func:`matricize`: returns the flat amplitude vector."""
    dims = tuple(dims)
    _check_bp(len(dims), bp)
    order = bp.left + bp.right
    shaped = np.asarray(matrix).reshape([dims[i] for i in order])
    return np.transpose(shaped, np.argsort(order)).reshape(-1)


# -- state files -----------------------------------------------------------


def state_to_dict(state: AmplitudeTensor) -> dict:
    return {
        "dims": list(state.dims),
        "amps": [[float(z.real), float(z.imag)] for z in state.amps],
    }


def state_from_dict(data, normalize: bool = False) -> AmplitudeTensor:
    try:
        dims = [int(d) for d in data["dims"]]
        raw = data["amps"]
        amps = [complex(float(re), float(im)) for re, im in raw]
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFormatError(
            'expected {"dims": [...], "amps": [[re, im], ...]}: ' + str(exc)
        ) from exc
    return make_state(dims, amps, normalize=normalize)


def dumps_state(state: AmplitudeTensor) -> str:
    # repr-based float output round-trips doubles exactly
    return json.dumps(state_to_dict(state)) + "\n"


def save_state(state: AmplitudeTensor, path) -> None:
    Path(path).write_text(dumps_state(state))


def load_state(path, normalize: bool = False) -> AmplitudeTensor:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{path}: invalid JSON: {exc}") from exc
    return state_from_dict(data, normalize=normalize)

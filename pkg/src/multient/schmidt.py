"""Schmidt decomposition, reduced density operators and purity."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import InvalidDensityMatrix, NonOrthonormalRightStates, PhaseCountMismatch
from .statespace import AmplitudeTensor, Bipartition, make_state, matricize, unmatricize

RANK_CUTOFF = 1e-12
TIE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidDensityMatrix(f"expected a square matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T), initial=0.0) > 1e-12:
            raise InvalidDensityMatrix("matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise InvalidDensityMatrix(f"trace is {np.trace(rho).real}, expected 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise InvalidDensityMatrix("matrix has a negative eigenvalue")
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.entries)[::-1]


def gram_purity(matrix: np.ndarray) -> float:
    """``Tr[(A A^dagger)^2]`` evaluated on the cheaper side of ``A``."""
    a = np.asarray(matrix)
    m, n = a.shape
    g = a @ a.conj().T if m <= n else a.conj().T @ a
    # Tr(G^2) = sum |G_ij|^2 for Hermitian G
    return float(np.sum(g.real**2 + g.imag**2))


def reduced_density(
    state: AmplitudeTensor, bp: Bipartition, side: Literal["left", "right"] = "left"
) -> DensityMatrix:
    """Reduced state of one block: ``A A^dagger`` (left) or ``A^dagger A`` (right).

    The right-side operator is written in the basis conjugate to the column
    index, which is the usual convention for a partial trace of ``|psi><psi|``
    only up to complex conjugation; its spectrum and purity are unaffected.
    """
    a = matricize(state, bp)
    if side == "left":
        rho = a @ a.conj().T
    elif side == "right":
        rho = a.conj().T @ a
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho)


def purity(rho) -> float:
    """``Tr(rho^2)``; accepts a :class:`DensityMatrix` or a plain array."""
    entries = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return float(np.real(np.trace(entries @ entries)))


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``|psi> = sum_j coefficients[j] |left_basis[:, j]> |right_basis[:, j]>``."""

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    bipartition: Bipartition

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def matrix(self) -> np.ndarray:
        return (self.left_basis * self.coefficients) @ self.right_basis.T

    def reconstruct(self, dims: Sequence[int]) -> AmplitudeTensor:
        amps = unmatricize(self.matrix(), dims, self.bipartition)
        return make_state(dims, amps, normalize=True)


def _lex_key(vec: np.ndarray) -> tuple:
    return tuple(x for z in np.round(vec, 12) for x in (z.real, z.imag))


def schmidt_decompose(state: AmplitudeTensor, bp: Bipartition) -> SchmidtDecomposition:
    """Schmidt decomposition across ``bp`` with a deterministic gauge.

    Each left vector has its first component of modulus above ``1e-12`` made
    real positive, with the inverse phase moved onto its right partner.
    Degenerate coefficients (within ``1e-10``) are ordered by descending
    lexicographic order of their gauge-fixed left vectors.
    """
    a = matricize(state, bp)
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s >= RANK_CUTOFF
    u, s, v = u[:, keep], s[keep], vh[keep, :].T.copy()

    for j in range(len(s)):
        col = u[:, j]
        k = int(np.argmax(np.abs(col) > RANK_CUTOFF))
        phase = col[k] / abs(col[k])
        u[:, j] = col / phase
        v[:, j] = v[:, j] * phase

    order = []
    start = 0
    while start < len(s):
        stop = start + 1
        while stop < len(s) and s[start] - s[stop] <= TIE_TOL:
            stop += 1
        group = sorted(range(start, stop), key=lambda j: _lex_key(u[:, j]), reverse=True)
        order.extend(group)
        start = stop

    return SchmidtDecomposition(s[order], u[:, order], v[:, order], bp)


def max_entangled_state(
    dims: Sequence[int],
    bp: Bipartition,
    phases: Sequence[float],
    right_states: Sequence[Sequence[complex]] | None = None,
) -> AmplitudeTensor:
    """Uniform-Schmidt state ``D^{-1/2} sum_j e^{i chi_j} |j>_left |Phi_j>_right``.

    ``D`` is the smaller block dimension. The left vectors are the first ``D``
    standard basis states of the left block; ``right_states`` defaults to the
    first ``D`` standard basis states of the right block.
    """
    dims = tuple(dims)
    m, n = bp.block_dims(dims)
    d = min(m, n)
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size != d:
        raise PhaseCountMismatch(f"need {d} phases, got {phases.size}")
    if right_states is None:
        phi = np.eye(n, dtype=complex)[:d]
    else:
        phi = np.asarray(right_states, dtype=complex)
        if phi.shape != (d, n):
            raise NonOrthonormalRightStates(f"expected {d} vectors of length {n}, got shape {phi.shape}")
        if not np.allclose(phi.conj() @ phi.T, np.eye(d), atol=1e-10, rtol=0.0):
            raise NonOrthonormalRightStates("right_states are not orthonormal")
    mat = np.zeros((m, n), dtype=complex)
    mat[:d, :] = np.exp(1j * phases)[:, None] * phi / np.sqrt(d)
    return make_state(dims, unmatricize(mat, dims, bp), normalize=True)

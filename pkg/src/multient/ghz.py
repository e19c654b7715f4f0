"""Local unitary circuits and GHZ canonicalization of maximal three-qubit states.

A three-qubit pure state with ``M = 1`` on all three single-qubit cuts is
brought to a reference frame in which it reads

    |psi> = 1/sqrt2 |0> (cos t1 |00> + e^{i x1} sin t1 |11>)
          + 1/sqrt2 e^{i x} |1> [cos t3 |0> (cos t2 |0> + e^{i x2} sin t2 |1>)
                                 + e^{i x3} sin t3 |1> (e^{-i x2} sin t2 |0> - cos t2 |1>)]

(qubit 1's frame from the Schmidt split 1|23, qubits 2 and 3 from the Schmidt
split of the ``|0>_1`` branch). Maximality forces ``cos t3 = sin t1`` and
either ``t2 = 0`` or ``t3 = pi/4``; each surviving case has an explicit local
map onto (|000> + |111>)/sqrt2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .detect import m_functional
from .errors import (
    BranchResolutionFailure,
    NonUnitary,
    NotMaximal,
    NotThreeQubits,
    SizeMismatch,
    StateFormatError,
)
from .named import ghz as ghz_state
from .schmidt import schmidt_decompose
from .statespace import AmplitudeTensor, Bipartition, make_state

UNITARY_TOL = 1e-10
DEFAULT_EPS = 1e-6
TWO_PI = 2 * math.pi

THETA2_ZERO_THETA3_ZERO = "Theta2ZeroTheta3Zero"
THETA2_ZERO_THETA3_HALF = "Theta2ZeroTheta3Half"
THETA2_ZERO_CHI_EQUAL = "Theta2ZeroChiEqual"
QUARTER_GENERIC = "QuarterGeneric"
QUARTER_THETA2_HALF = "QuarterTheta2Half"
BRANCHES = (
    THETA2_ZERO_THETA3_ZERO,
    THETA2_ZERO_THETA3_HALF,
    THETA2_ZERO_CHI_EQUAL,
    QUARTER_GENERIC,
    QUARTER_THETA2_HALF,
)


@dataclass(frozen=True, eq=False)
class LocalUnitaryCircuit:
    """One unitary per subsystem, applied as their tensor product."""

    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = []
        for k, u in enumerate(self.unitaries):
            u = np.array(u, dtype=complex)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise NonUnitary(f"unitary {k} is not square: shape {u.shape}")
            err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
            if err > UNITARY_TOL:
                raise NonUnitary(f"unitary {k} deviates from unitarity by {err:.3g}")
            u.setflags(write=False)
            mats.append(u)
        object.__setattr__(self, "unitaries", tuple(mats))

    @classmethod
    def identity(cls, dims: Sequence[int]) -> "LocalUnitaryCircuit":
        return cls(tuple(np.eye(d) for d in dims))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.unitaries)

    def then(self, other: "LocalUnitaryCircuit") -> "LocalUnitaryCircuit":
        """Circuit applying ``self`` first and ``other`` second."""
        if self.dims != other.dims:
            raise SizeMismatch(f"cannot compose circuits on {self.dims} and {other.dims}")
        return LocalUnitaryCircuit(tuple(b @ a for a, b in zip(self.unitaries, other.unitaries)))

    def inverse(self) -> "LocalUnitaryCircuit":
        return LocalUnitaryCircuit(tuple(u.conj().T for u in self.unitaries))

    def to_list(self) -> list:
        return [
            [[[float(z.real), float(z.imag)] for z in row] for row in u]
            for u in self.unitaries
        ]

    @classmethod
    def from_list(cls, data) -> "LocalUnitaryCircuit":
        try:
            mats = [np.array([[complex(re, im) for re, im in row] for row in u]) for u in data]
        except (TypeError, ValueError) as exc:
            raise StateFormatError(f"malformed circuit: {exc}") from exc
        return cls(tuple(mats))


def save_circuit(circuit: LocalUnitaryCircuit, path) -> None:
    Path(path).write_text(json.dumps(circuit.to_list()) + "\n")


def load_circuit(path) -> LocalUnitaryCircuit:
    try:
        return LocalUnitaryCircuit.from_list(json.loads(Path(path).read_text()))
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"{path}: invalid JSON: {exc}") from exc


def apply_local_unitary(state: AmplitudeTensor, circuit: LocalUnitaryCircuit) -> AmplitudeTensor:
    """``(U_1 (x) ... (x) U_N) |psi>``."""
    if circuit.dims != state.dims:
        raise SizeMismatch(f"circuit acts on {circuit.dims}, state has dims {state.dims}")
    t = state.tensor
    for axis, u in enumerate(circuit.unitaries):
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [axis])), 0, axis)
    return make_state(state.dims, t, normalize=True)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random ``d x d`` unitary (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_circuit(dims: Sequence[int], seed) -> LocalUnitaryCircuit:
    rng = np.random.default_rng(seed)
    return LocalUnitaryCircuit(tuple(random_unitary(d, rng) for d in dims))


# -- maximality and canonicalization ------------------------------------------


def _require_three_qubits(state: AmplitudeTensor) -> None:
    if state.dims != (2, 2, 2):
        raise NotThreeQubits(f"expected dims [2, 2, 2], got {list(state.dims)}")


def single_qubit_m(state: AmplitudeTensor) -> list[float]:
    """``[M_1, M_2, M_3]``: each qubit against the other two, in qubit order."""
    _require_three_qubits(state)
    return [m_functional(state, Bipartition.from_block([k], 3)) for k in range(3)]


def check_maximal(state: AmplitudeTensor, eps: float = DEFAULT_EPS) -> bool:
    return all(m >= 1.0 - eps for m in single_qubit_m(state))


@dataclass(frozen=True)
class CanonicalizationTrace:
    """Parameters of the reference-frame form and the case that was applied.

    Angles lie in ``[0, pi/2]``, phases in ``[0, 2 pi)``. Phases that the
    frame form leaves undetermined (a vanishing amplitude) are reported as 0.
    ``fidelity`` is the GHZ fidelity reached by the returned circuit.
    """

    theta1: float
    theta2: float
    theta3: float
    chi: float
    chi1: float
    chi2: float
    chi3: float
    branch: str
    fidelity: float = float("nan")

    def frame_amplitudes(self) -> np.ndarray:
        """The 2x2x2 amplitude tensor of the frame form for these parameters."""
        return frame_tensor(
            self.theta1, self.theta2, self.theta3, self.chi, self.chi1, self.chi2, self.chi3
        )

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def frame_tensor(t1, t2, t3, chi, chi1, chi2, chi3) -> np.ndarray:
    e = lambda x: np.exp(1j * x)
    out = np.zeros((2, 2, 2), dtype=complex)
    out[0, 0, 0] = math.cos(t1)
    out[0, 1, 1] = e(chi1) * math.sin(t1)
    out[1, 0, 0] = e(chi) * math.cos(t3) * math.cos(t2)
    out[1, 0, 1] = e(chi + chi2) * math.cos(t3) * math.sin(t2)
    out[1, 1, 0] = e(chi + chi3 - chi2) * math.sin(t3) * math.sin(t2)
    out[1, 1, 1] = -e(chi + chi3) * math.sin(t3) * math.cos(t2)
    return out / math.sqrt(2)


def _phase(z: complex) -> float:
    return math.atan2(z.imag, z.real) % TWO_PI


def _gauge_columns(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make the first non-negligible entry of each column real positive.

    Returns the gauged matrix and the phases that were divided out.
    """
    mat = mat.copy()
    phases = np.ones(mat.shape[1], dtype=complex)
    for j in range(mat.shape[1]):
        col = mat[:, j]
        k = int(np.argmax(np.abs(col) > 1e-12))
        phases[j] = col[k] / abs(col[k])
        mat[:, j] = col / phases[j]
    return mat, phases


def _to_frame(state: AmplitudeTensor) -> tuple[list[np.ndarray], np.ndarray]:
    """Local unitaries taking ``state`` to the reference frame, and the framed tensor."""
    sd = schmidt_decompose(state, Bipartition((0,), (1, 2)))
    if sd.rank == 2:
        basis1 = sd.left_basis
    else:
        # a product across 1|23 cannot be maximal; complete the basis anyway
        v = sd.left_basis[:, 0]
        basis1 = np.column_stack([v, [-np.conj(v[1]), np.conj(v[0])]])
    r1 = basis1.conj().T
    t = np.tensordot(r1, state.tensor, axes=([1], [0]))

    # Schmidt split of the |0>_1 branch fixes the frames of qubits 2 and 3
    p, _, qh = np.linalg.svd(t[0])
    p, _ = _gauge_columns(p)
    q, _ = _gauge_columns(qh.T)
    r2, r3 = p.conj().T, q.conj().T
    t = np.einsum("ab,cd,ibd->iac", r2, r3, t)

    # make the |000> amplitude real positive through qubit 1's frame
    lead = t[0, 0, 0]
    if abs(lead) > 1e-15:
        ph = np.conj(lead) / abs(lead)
        r1 = np.diag([ph, 1.0]) @ r1
        t[0] *= ph
    return [r1, r2, r3], t


def _extract_parameters(t: np.ndarray, tol: float) -> dict:
    """Read the frame-form parameters off a framed tensor."""
    s = math.sqrt(2)
    zero_branch, one_branch = s * t[0], s * t[1]
    theta1 = math.atan2(abs(zero_branch[1, 1]), abs(zero_branch[0, 0]))
    chi1 = _phase(zero_branch[1, 1]) if abs(zero_branch[1, 1]) > tol else 0.0

    g = one_branch
    theta3 = math.atan2(np.linalg.norm(g[1]), np.linalg.norm(g[0]))
    theta2 = math.atan2(abs(g[0, 1]) + abs(g[1, 0]), abs(g[0, 0]) + abs(g[1, 1]))

    # products chosen so that both contributions carry the same phase
    w2 = g[0, 1] * np.conj(g[0, 0]) - g[1, 1] * np.conj(g[1, 0])
    chi2 = _phase(w2) if abs(w2) > tol**2 else 0.0
    rot = np.exp(-1j * chi2)
    w0 = g[0, 0] + g[0, 1] * rot
    chi = _phase(w0) if abs(w0) > tol else 0.0
    w3 = g[1, 0] / rot - g[1, 1]
    chi3 = (_phase(w3) - chi) % TWO_PI if abs(w3) > tol else 0.0
    return dict(theta1=theta1, theta2=theta2, theta3=theta3, chi=chi, chi1=chi1, chi2=chi2, chi3=chi3)


def _select_branch(p: dict, tol: float) -> str:
    t1, t2, t3 = p["theta1"], p["theta2"], p["theta3"]
    if abs(math.cos(t3) - math.sin(t1)) > tol:
        raise BranchResolutionFailure(
            f"normalization constraint cos(theta3) = sin(theta1) violated: "
            f"{math.cos(t3):.6g} vs {math.sin(t1):.6g}"
        )
    chis_equal = abs(np.exp(1j * p["chi1"]) - np.exp(1j * p["chi3"])) <= tol
    if math.sin(t2) <= tol:
        if math.sin(t3) <= tol:
            return THETA2_ZERO_THETA3_ZERO
        if math.cos(t3) <= tol:
            return THETA2_ZERO_THETA3_HALF
        if chis_equal:
            return THETA2_ZERO_CHI_EQUAL
    if abs(t3 - math.pi / 4) <= tol:
        if math.cos(t2) <= tol:
            return QUARTER_THETA2_HALF
        if chis_equal:
            return QUARTER_GENERIC
    raise BranchResolutionFailure(
        "no case fits the extracted parameters "
        + ", ".join(f"{k}={v:.6g}" for k, v in p.items())
    )


def _hadamard_like(phase: float) -> np.ndarray:
    """Columns (|0> + e^{i phase}|1>)/sqrt2 and (|0> - e^{i phase}|1>)/sqrt2."""
    e = np.exp(1j * phase)
    return np.array([[1, 1], [e, -e]]) / math.sqrt(2)


def _half_angle_map(half: float, phase: float) -> np.ndarray:
    e = np.exp(1j * phase)
    c, s = math.cos(half), math.sin(half)
    return np.array([[c, s], [e * s, -e * c]])


def branch_circuit(trace: CanonicalizationTrace) -> LocalUnitaryCircuit:
    """Local map sending the frame form of ``trace`` onto GHZ."""
    e = lambda x: np.exp(1j * x)
    eye = np.eye(2, dtype=complex)
    chi, chi1, chi2, chi3 = trace.chi, trace.chi1, trace.chi2, trace.chi3
    branch = trace.branch
    if branch == THETA2_ZERO_THETA3_ZERO:
        # e^{i chi1}|011> + e^{i chi}|100>: flip qubit 1 and strip the phases
        u1 = np.array([[0, e(-chi)], [e(-chi1), 0]])
        return LocalUnitaryCircuit((u1, eye, eye))
    if branch == THETA2_ZERO_THETA3_HALF:
        # |000> - e^{i(chi + chi3)}|111>
        return LocalUnitaryCircuit((np.diag([1, -e(-chi - chi3)]), eye, eye))
    if branch == THETA2_ZERO_CHI_EQUAL:
        st, ct = math.sin(trace.theta3), math.cos(trace.theta3)
        zero = np.array([st, e(chi) * ct])
        one = np.array([e(chi3) * ct, -e(chi + chi3) * st])
        return LocalUnitaryCircuit((np.vstack([zero.conj(), one.conj()]), eye, eye))
    if branch == QUARTER_GENERIC:
        half = trace.theta2 / 2
        v = (
            _hadamard_like(chi),
            _half_angle_map(half, chi1 - chi2),
            _half_angle_map(half, chi2),
        )
        return LocalUnitaryCircuit(tuple(u.conj().T for u in v))
    if branch == QUARTER_THETA2_HALF:
        v = (
            _hadamard_like(chi - chi1 / 2 + chi3 / 2),
            _hadamard_like(chi1 / 2 - chi2 + chi3 / 2),
            _hadamard_like(chi1 / 2 + chi2 - chi3 / 2),
        )
        return LocalUnitaryCircuit(tuple(u.conj().T for u in v))
    raise ValueError(f"unknown branch {branch!r}")


def ghz_canonicalize(
    state: AmplitudeTensor, eps: float = DEFAULT_EPS
) -> tuple[LocalUnitaryCircuit, CanonicalizationTrace]:
    """Local unitary circuit mapping a maximal three-qubit state onto GHZ.

    Parameters
    ----------
    state : AmplitudeTensor
        Three-qubit state with every single-qubit ``M >= 1 - eps``.
    eps : float
        Maximality tolerance. The case analysis accepts constraint residuals
        up to ``10 sqrt(eps)``, since residuals are first order in the
        amplitude error while ``1 - M`` is second order.

    Returns
    -------
    circuit, trace
        ``apply_local_unitary(state, circuit)`` is GHZ up to a global phase;
        ``trace.fidelity`` records the fidelity actually reached.

    Raises
    ------
    NotThreeQubits, NotMaximal, BranchResolutionFailure
    """
    _require_three_qubits(state)
    ms = single_qubit_m(state)
    if min(ms) < 1.0 - eps:
        raise NotMaximal(f"single-qubit M values {[round(m, 9) for m in ms]} are not all >= 1 - {eps:g}")
    tol = 10.0 * math.sqrt(eps)

    frame, t = _to_frame(state)
    params = _extract_parameters(t, tol=1e-12)
    branch = _select_branch(params, tol)
    trace = CanonicalizationTrace(**params, branch=branch)

    circuit = LocalUnitaryCircuit(tuple(frame)).then(branch_circuit(trace))
    fidelity = apply_local_unitary(state, circuit).fidelity(ghz_state())
    return circuit, CanonicalizationTrace(**params, branch=branch, fidelity=fidelity)

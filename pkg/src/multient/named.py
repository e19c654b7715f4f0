"""Reference states used throughout the examples and tests."""
import math

import numpy as np

from .statespace import AmplitudeTensor, make_state


def _from_terms(dims, terms, scale) -> AmplitudeTensor:
    amps = np.zeros(dims, dtype=complex)
    for bits, coeff in terms.items():
        amps[tuple(int(b) for b in bits)] = coeff * scale
    return make_state(dims, amps)


def ghz() -> AmplitudeTensor:
    """(|000> + |111>)/sqrt(2)"""
    return _from_terms((2, 2, 2), {"000": 1, "111": 1}, 1 / math.sqrt(2))


def w() -> AmplitudeTensor:
    """(|100> + |010> + |001>)/sqrt(3)"""
    return _from_terms((2, 2, 2), {"100": 1, "010": 1, "001": 1}, 1 / math.sqrt(3))


def bell() -> AmplitudeTensor:
    """(|00> + |11>)/sqrt(2)"""
    return _from_terms((2, 2), {"00": 1, "11": 1}, 1 / math.sqrt(2))


def psi_bis() -> AmplitudeTensor:
    """(|000> + |011>)/sqrt(2): product of qubit 0 with a Bell pair."""
    return _from_terms((2, 2, 2), {"000": 1, "011": 1}, 1 / math.sqrt(2))


def phi() -> AmplitudeTensor:
    """(5|000> + 3|010> + 2|001> + 4|011> + 7|101> + |111>) / (2 sqrt(26))"""
    terms = {"000": 5, "010": 3, "001": 2, "011": 4, "101": 7, "111": 1}
    return _from_terms((2, 2, 2), terms, 1 / (2 * math.sqrt(26)))


NAMED_STATES = {
    "ghz": ghz,
    "w": w,
    "bell": bell,
    "psi-bis": psi_bis,
    "phi": phi,
}


def named_state(name: str) -> AmplitudeTensor:
    try:
        return NAMED_STATES[name]()
    except KeyError:
        raise KeyError(
            f"unknown state {name!r}; choose from {', '.join(NAMED_STATES)}"
        ) from None

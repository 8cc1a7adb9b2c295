"""State-vector check of the Bell-basis algebra behind controlled-Z gate teleportation.

Six two-level systems are tracked, most significant first::

    spin_1, photon_1, photon_2, photon_3, photon_4, spin_4

with |H> = |down> = 0 and |V> = |up> = 1. Alice holds spin_1/photon_1, Bob
holds photon_4/spin_4, and the network delivers photons 2 and 3 in psi+.
Bell states: phi+- = (|00> +- |11>)/sqrt2, psi+- = (|01> +- |10>)/sqrt2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from satqin.errors import DomainError

N_QUBITS = 6
SPIN1, PHOTON1, PHOTON2, PHOTON3, PHOTON4, SPIN4 = range(N_QUBITS)
LABELS = ("phi+", "phi-", "psi+", "psi-")

_S = 1.0 / np.sqrt(2.0)
BELL: dict[str, np.ndarray] = {
    "phi+": _S * np.array([1.0, 0.0, 0.0, 1.0]),
    "phi-": _S * np.array([1.0, 0.0, 0.0, -1.0]),
    "psi+": _S * np.array([0.0, 1.0, 1.0, 0.0]),
    "psi-": _S * np.array([0.0, 1.0, -1.0, 0.0]),
}

# Expected expansion coefficients, keyed by (pair 12, pair 34, spin pair 1-4).
# Each spin Bell state multiplies four photonic terms of weight 1/4.
EXPECTED_EXPANSION: dict[tuple[str, str, str], float] = {
    ("phi+", "psi+", "phi+"): 0.25,
    ("psi+", "phi+", "phi+"): 0.25,
    ("psi-", "phi-", "phi+"): 0.25,
    ("phi-", "psi-", "phi+"): -0.25,
    ("phi-", "psi+", "phi-"): 0.25,
    ("psi-", "phi+", "phi-"): 0.25,
    ("psi+", "phi-", "phi-"): 0.25,
    ("phi+", "psi-", "phi-"): -0.25,
    ("phi+", "phi+", "psi+"): 0.25,
    ("phi-", "phi-", "psi+"): -0.25,
    ("psi+", "psi+", "psi+"): 0.25,
    ("psi-", "psi-", "psi+"): 0.25,
    ("phi-", "phi+", "psi-"): 0.25,
    ("phi+", "phi-", "psi-"): -0.25,
    ("psi+", "psi-", "psi-"): 0.25,
    ("psi-", "psi+", "psi-"): 0.25,
}


@dataclass(frozen=True)
class GateBudget:
    delivered_pairs: int
    cz_gates: int
    arbitrary_two_qubit_unitaries: int


def _check_normalized(state: np.ndarray, tol: float = 1e-12) -> None:
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > tol:
        raise DomainError(f"state is not normalized (norm {norm!r})")


def build_initial_state() -> np.ndarray:
    """Spin-photon pairs at both ends with psi+ on the network photons 2 and 3."""
    hybrid = _S * np.array([1.0, 0.0, 0.0, 1.0])  # (|H,down> + |V,up>)/sqrt2 over (photon, spin)
    state = np.zeros(2**N_QUBITS)
    for s1, s4, p2 in itertools.product((0, 1), repeat=3):
        bits = {SPIN1: s1, PHOTON1: s1, PHOTON2: p2, PHOTON3: 1 - p2, PHOTON4: s4, SPIN4: s4}
        index = sum(bit << (N_QUBITS - 1 - q) for q, bit in bits.items())
        state[index] = hybrid[3 * s1] * BELL["psi+"][2 * p2 + (1 - p2)] * hybrid[3 * s4]
    return state


def bell_decompose(
    state: np.ndarray, bell: dict[str, np.ndarray] = BELL
) -> dict[tuple[str, str, str], complex | float]:
    """Coefficients of ``state`` in the product Bell basis of pairs (1,2), (3,4) and the spins.

    Keys are (label_12, label_34, spin_label); all 64 combinations are returned.
    """
    state = np.asarray(state)
    _check_normalized(state)
    tensor = state.reshape((2,) * N_QUBITS)
    mats = {k: np.conj(v).reshape(2, 2) for k, v in bell.items()}
    coeffs = {}
    for a, b, c in itertools.product(bell, repeat=3):
        # indices: spin1 i, photon1 j, photon2 k, photon3 l, photon4 m, spin4 n
        coeffs[(a, b, c)] = np.einsum("ijklmn,jk,lm,in->", tensor, mats[a], mats[b], mats[c]).item()
    return coeffs


def recompose(coeffs: dict[tuple[str, str, str], complex | float], bell: dict[str, np.ndarray] = BELL) -> np.ndarray:
    """Inverse of :func:`bell_decompose`."""
    state = np.zeros(2**N_QUBITS, dtype=complex)
    for (a, b, c), amp in coeffs.items():
        pair12 = bell[a].reshape(2, 2)
        pair34 = bell[b].reshape(2, 2)
        spins = bell[c].reshape(2, 2)
        state += amp * np.einsum("jk,lm,in->ijklmn", pair12, pair34, spins).reshape(-1)
    return state


def project_bsm(state: np.ndarray, outcome12: str, outcome34: str) -> tuple[np.ndarray, float]:
    """Post-measurement spin state (basis |s1 s4>) and probability of the joint outcome."""
    if outcome12 not in BELL or outcome34 not in BELL:
        raise DomainError(f"unknown Bell label {outcome12!r}/{outcome34!r}")
    tensor = np.asarray(state).reshape((2,) * N_QUBITS)
    b12 = np.conj(BELL[outcome12]).reshape(2, 2)
    b34 = np.conj(BELL[outcome34]).reshape(2, 2)
    spin = np.einsum("ijklmn,jk,lm->in", tensor, b12, b34).reshape(4)
    prob = float(np.vdot(spin, spin).real)
    if prob == 0:
        raise DomainError(f"outcome ({outcome12}, {outcome34}) has zero probability")
    return spin / np.sqrt(prob), prob


def reduced_spin_density(spin_state: np.ndarray) -> np.ndarray:
    """Reduced density matrix of spin 1 from a two-spin pure state."""
    m = np.asarray(spin_state).reshape(2, 2)
    return m @ m.conj().T


def gate_budget(delivered_pairs: int) -> GateBudget:
    """One Bell pair per teleported CZ; three CZ per arbitrary two-qubit unitary."""
    if delivered_pairs < 0:
        raise DomainError("delivered pair count must be >= 0")
    pairs = int(delivered_pairs)
    return GateBudget(pairs, pairs, pairs // 3)

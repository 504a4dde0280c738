"""Dense statevector simulation of the three sampling circuits.

States live on ``num_qudits`` qudits of equal dimension; the flat amplitude
index uses the same mixed-radix convention as probability tables (qudit 0
most significant). Single-qudit gates are applied by axis permutation, one
sequential pass per qudit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import NumericalCheckError, SizeGuardError
from .families import PolynomialSpec, monomial_of_index
from .squashed import SquashedTransform, build_squashed_transform
from .tables import DOUBLE, ProbabilityTable, mixed_radix_index

STATE_SIZE_GUARD = 1 << 26
NORM_TOL = 1e-9
FOLD_CIRCUIT_MAX_QUBITS = 13


@dataclass
class StateVector:
    qudit_dim: int
    num_qudits: int
    amps: np.ndarray

    @property
    def size(self) -> int:
        return self.qudit_dim**self.num_qudits

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def validate_norm(self, tol: float = NORM_TOL) -> None:
        drift = abs(self.norm() - 1.0)
        if drift > tol:
            raise NumericalCheckError(f"state norm off unity by {drift:.3e}")

    def to_json_dict(self) -> dict:
        return {
            "qudit_dim": self.qudit_dim,
            "num_qudits": self.num_qudits,
            "amps": [[float(a.real), float(a.imag)] for a in self.amps],
        }


def prepare_monomial_superposition(
    spec: PolynomialSpec, qudit_dim: int, guard: int = STATE_SIZE_GUARD
) -> StateVector:
    """Uniform superposition over the family's monomial masks (levels 0/1).

    Amplitudes are placed directly; the two-register prepare/uncompute
    choreography that a real machine would run is information-equivalent
    and is not simulated.
    """
    if qudit_dim < 2:
        raise ValueError("qudit dimension must be >= 2")
    guard = min(guard, STATE_SIZE_GUARD)
    size = qudit_dim**spec.n_vars
    if size > guard:
        raise SizeGuardError(f"statevector of {size} amplitudes exceeds guard {guard}")
    amps = np.zeros(size, dtype=np.complex128)
    weight = 1.0 / sqrt(spec.num_monomials)
    for z in range(spec.num_monomials):
        index = mixed_radix_index(monomial_of_index(spec, z), qudit_dim)
        if amps[index] != 0:
            raise NumericalCheckError(f"monomial map is not injective at flat index {index}")
        amps[index] = weight
    return StateVector(qudit_dim, spec.n_vars, amps)


def apply_single_qudit_gate(state: StateVector, matrix: np.ndarray, qudit: int) -> StateVector:
    q, n = state.qudit_dim, state.num_qudits
    psi = state.amps.reshape([q] * n)
    psi = np.moveaxis(psi, qudit, 0)
    psi = np.tensordot(np.asarray(matrix, dtype=np.complex128), psi, axes=([1], [0]))
    psi = np.moveaxis(psi, 0, qudit)
    return StateVector(q, n, np.ascontiguousarray(psi).reshape(-1))


def qft_matrix(radix: int, inverse: bool = False) -> np.ndarray:
    # Forward kernel omega^(+y*z)/sqrt(radix); the inverse flips the sign.
    grid = np.outer(np.arange(radix), np.arange(radix))
    sign = -1.0 if inverse else 1.0
    return np.exp(sign * 2j * np.pi * grid / radix) / sqrt(radix)


def apply_qft(state: StateVector, radix: int | None = None, inverse: bool = False) -> StateVector:
    if radix is not None and radix != state.qudit_dim:
        raise ValueError(f"transform radix {radix} != qudit dimension {state.qudit_dim}")
    gate = qft_matrix(state.qudit_dim, inverse=inverse)
    for qudit in range(state.num_qudits):
        state = apply_single_qudit_gate(state, gate, qudit)
    return state


def measurement_distribution(state: StateVector) -> ProbabilityTable:
    probs = np.abs(state.amps) ** 2
    return ProbabilityTable(state.qudit_dim, state.num_qudits, probs, DOUBLE)


def run_roots_sampler_circuit(
    spec: PolynomialSpec, ell: int, guard: int = STATE_SIZE_GUARD
) -> ProbabilityTable:
    """Monomial superposition on ell-level qudits, Fourier transform, measure."""
    state = prepare_monomial_superposition(spec, ell, guard=guard)
    state = apply_qft(state)
    state.validate_norm()
    return measurement_distribution(state)


def run_squashed_sampler_circuit(
    spec: PolynomialSpec,
    k: int,
    transform: SquashedTransform | None = None,
    guard: int = STATE_SIZE_GUARD,
) -> ProbabilityTable:
    """Monomial superposition on (k+1)-level qudits, squashed transform, measure.

    The transform's rows are ordered by minus-count while squashed tables
    index classes by plus-count, so each qudit axis is reversed before the
    measurement table is formed.
    """
    if transform is None:
        transform = build_squashed_transform(k)
    elif transform.k != k:
        raise ValueError(f"transform is for k = {transform.k}, not {k}")
    state = prepare_monomial_superposition(spec, k + 1, guard=guard)
    for qudit in range(state.num_qudits):
        state = apply_single_qudit_gate(state, transform.unitary, qudit)
    state.validate_norm()
    probs = np.abs(state.amps) ** 2
    n = state.num_qudits
    flipped = probs.reshape([k + 1] * n)[tuple(slice(None, None, -1) for _ in range(n))]
    return ProbabilityTable(k + 1, n, np.ascontiguousarray(flipped).reshape(-1), DOUBLE)


def run_fold_sampler_circuit(truth_table) -> ProbabilityTable:
    """Phase-encode a +-1 truth table, apply the qubit Fourier transform, measure."""
    values = np.asarray(truth_table, dtype=np.int64)
    n = len(values).bit_length() - 1
    if len(values) != 1 << n or n < 1:
        raise ValueError(f"truth table length {len(values)} is not a power of two")
    if n > FOLD_CIRCUIT_MAX_QUBITS:
        raise SizeGuardError(f"fold circuit capped at {FOLD_CIRCUIT_MAX_QUBITS} qubits, got {n}")
    if not np.all(np.abs(values) == 1):
        raise ValueError("truth table entries must be +-1")
    amps = values.astype(np.complex128) / sqrt(len(values))
    state = apply_qft(StateVector(2, n, amps))
    state.validate_norm()
    return measurement_distribution(state)

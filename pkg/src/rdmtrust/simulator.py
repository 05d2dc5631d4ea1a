"""Dense statevector / density-matrix simulation with depolarizing noise."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .circuits import Circuit, Gate

MAX_STATEVECTOR_QUBITS = 10
MAX_DENSITY_QUBITS = 8


@dataclass
class NoiseModel:
    """Depolarizing noise: p1 on single-qubit gates, p2 on two-qubit gates.

    ``per-gate-local`` replaces the acted-on marginal with the maximally
    mixed state after every gate; ``per-layer-global`` mixes the full state
    with I/2^n after every layer.
    """

    p1: float = 0.0
    p2: float = 0.0
    mode: str = "per-gate-local"

    def __post_init__(self):
        if not (0.0 <= self.p1 <= 1.0 and 0.0 <= self.p2 <= 1.0):
            raise ValueError("depolarizing probabilities must lie in [0, 1]")
        if self.mode not in ("per-gate-local", "per-layer-global"):
            raise ValueError(f"unknown noise mode {self.mode!r}")


@dataclass
class QuantumState:
    """Pure statevector (1-D) or density matrix (2-D) over n qubits."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=complex)
        if self.data.ndim not in (1, 2):
            raise ValueError("state must be a vector or square matrix")
        if self.data.ndim == 2 and self.data.shape[0] != self.data.shape[1]:
            raise ValueError("density matrix must be square")

    @property
    def is_density(self) -> bool:
        return self.data.ndim == 2

    @property
    def n(self) -> int:
        return int(round(np.log2(self.data.shape[0])))

    @classmethod
    def zero(cls, n: int) -> "QuantumState":
        v = np.zeros(1 << n, dtype=complex)
        v[0] = 1.0
        return cls(v)

    def to_density(self) -> "QuantumState":
        if self.is_density:
            return QuantumState(self.data.copy())
        return QuantumState(np.outer(self.data, self.data.conj()))

    def validate(self, tol: float = 1e-10) -> None:
        if self.is_density:
            if abs(np.trace(self.data) - 1.0) > tol:
                raise ValueError("density matrix trace differs from 1")
            if np.max(np.abs(self.data - self.data.conj().T)) > tol:
                raise ValueError("density matrix is not Hermitian")
            if np.linalg.eigvalsh(self.data)[0] < -tol:
                raise ValueError("density matrix has a negative eigenvalue")
        elif abs(np.linalg.norm(self.data) - 1.0) > tol:
            raise ValueError("statevector norm differs from 1")


def _apply_to_axes(tensor: np.ndarray, u: np.ndarray, axes: list[int]) -> np.ndarray:
    """Contract ``u`` (2^k x 2^k) into the given tensor axes, in order."""
    k = len(axes)
    t = np.moveaxis(tensor, axes, range(k))
    shape = t.shape
    t = u @ t.reshape(1 << k, -1)
    return np.moveaxis(t.reshape(shape), range(k), axes)


def _apply_gate_vector(vec: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    tensor = vec.reshape([2] * n)
    axes = [n - 1 - q for q in gate.qubits]
    return _apply_to_axes(tensor, gate.matrix(), axes).reshape(-1)


def _apply_gate_density(rho: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    tensor = rho.reshape([2] * (2 * n))
    u = gate.matrix()
    row_axes = [n - 1 - q for q in gate.qubits]
    col_axes = [2 * n - 1 - q for q in gate.qubits]
    tensor = _apply_to_axes(tensor, u, row_axes)
    tensor = _apply_to_axes(tensor, u.conj(), col_axes)
    return tensor.reshape(1 << n, 1 << n)


def _replace_with_mixed(rho: np.ndarray, qubits: tuple[int, ...], n: int) -> np.ndarray:
    """(I/2^k on ``qubits``) tensor Tr_qubits(rho)."""
    k = len(qubits)
    tensor = rho.reshape([2] * (2 * n))
    row_axes = [n - 1 - q for q in qubits]
    col_axes = [2 * n - 1 - q for q in qubits]
    letters = list(range(2 * n))
    for ra, ca in zip(row_axes, col_axes):
        letters[ca] = letters[ra]
    reduced = np.einsum(tensor, letters)
    out = np.zeros_like(tensor)
    idx_base: list = [slice(None)] * (2 * n)
    for bits in product((0, 1), repeat=k):
        idx = list(idx_base)
        for b, ra, ca in zip(bits, row_axes, col_axes):
            idx[ra] = b
            idx[ca] = b
        out[tuple(idx)] = reduced / (1 << k)
    return out.reshape(1 << n, 1 << n)


def depolarize(rho: np.ndarray, qubits: tuple[int, ...], p: float, n: int) -> np.ndarray:
    if p == 0.0:
        return rho
    return (1.0 - p) * rho + p * _replace_with_mixed(rho, qubits, n)


def simulate(circuit: Circuit, noise: NoiseModel | None = None,
             initial: QuantumState | None = None) -> QuantumState:
    """Run a circuit exactly (statevector or density matrix).

    With a noise model the state is promoted to a density matrix and the
    configured depolarizing channel is applied per gate or per layer.
    """
    n = circuit.n
    state = QuantumState.zero(n) if initial is None else QuantumState(initial.data.copy())
    if state.data.shape[0] != (1 << n):
        raise ValueError("initial state dimension mismatch")
    noisy = noise is not None
    if noisy or state.is_density:
        if n > MAX_DENSITY_QUBITS:
            raise ValueError(f"density-matrix simulation capped at {MAX_DENSITY_QUBITS} qubits")
    elif n > MAX_STATEVECTOR_QUBITS:
        raise ValueError(f"statevector simulation capped at {MAX_STATEVECTOR_QUBITS} qubits")

    if not noisy:
        data = state.data
        if state.is_density:
            for g in circuit.gates:
                data = _apply_gate_density(data, g, n)
        else:
            for g in circuit.gates:
                data = _apply_gate_vector(data, g, n)
        return QuantumState(data)

    rho = state.to_density().data
    if noise.mode == "per-gate-local":
        for g in circuit.gates:
            rho = _apply_gate_density(rho, g, n)
            p = noise.p1 if g.arity == 1 else noise.p2
            rho = depolarize(rho, g.qubits, p, n)
    else:
        dim = 1 << n
        for layer in circuit.layers:
            for g in layer.gates:
                rho = _apply_gate_density(rho, g, n)
            p = noise.p1 if layer.tag == "1q" else noise.p2
            if p:
                rho = (1.0 - p) * rho + p * np.eye(dim) / dim
    return QuantumState(rho)

"""Fermionic operator algebra and the Jordan-Wigner qubit mapping.

Conventions used throughout the package:

* spin-orbital ``p`` maps to qubit ``p`` (alpha even, beta odd, interleaved
  relative to spatial orbitals),
* qubit 0 is the least-significant bit of a computational basis index,
* ``a_p† -> Z_0 ... Z_{p-1} (X_p - iY_p)/2`` and
  ``a_p  -> Z_0 ... Z_{p-1} (X_p + iY_p)/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

PAULI_LABELS = "IXYZ"

# sigma_a . sigma_b = phase * sigma_c, keyed by label pair
_PAULI_PRODUCT = {
    ("I", "I"): (1.0, "I"), ("I", "X"): (1.0, "X"), ("I", "Y"): (1.0, "Y"), ("I", "Z"): (1.0, "Z"),
    ("X", "I"): (1.0, "X"), ("X", "X"): (1.0, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1.0, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1.0, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1.0, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1.0, "I"),
}

_SINGLE_QUBIT_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class DimensionError(ValueError):
    """Raised when operator and state dimensions are inconsistent."""


@dataclass(frozen=True)
class FermionTerm:
    """A scalar multiple of a product of creation/annihilation operators.

    ``factors`` is an ordered sequence of ``(orbital, dagger)`` pairs applied
    right-to-left to kets, i.e. ``factors=[(0, True), (1, False)]`` denotes
    ``a_0† a_1``.  An empty factor list is a pure scalar.
    """

    coefficient: complex
    factors: tuple[tuple[int, bool], ...] = ()

    def dagger(self) -> "FermionTerm":
        flipped = tuple((orb, not dg) for orb, dg in reversed(self.factors))
        return FermionTerm(np.conj(self.coefficient), flipped)


@dataclass(frozen=True)
class PauliTerm:
    """A scalar multiple of a tensor product of single-qubit Paulis.

    ``letters[i]`` is the Pauli acting on qubit ``i``.
    """

    coefficient: complex
    letters: str

    @property
    def n(self) -> int:
        return len(self.letters)


class PauliSum:
    """A sum of Pauli terms over a fixed qubit count, deduplicated by letters."""

    def __init__(self, n: int, terms: dict[str, complex] | None = None):
        self.n = n
        self._terms: dict[str, complex] = dict(terms) if terms else {}

    @classmethod
    def from_terms(cls, terms: list[PauliTerm]) -> "PauliSum":
        if not terms:
            raise ValueError("cannot infer qubit count from an empty term list")
        n = terms[0].n
        out = cls(n)
        for t in terms:
            if t.n != n:
                raise DimensionError("mixed qubit counts in Pauli terms")
            out.add(t.letters, t.coefficient)
        return out

    @classmethod
    def identity(cls, n: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls(n, {"I" * n: complex(coefficient)})

    @classmethod
    def zero(cls, n: int) -> "PauliSum":
        return cls(n)

    @property
    def terms(self) -> list[PauliTerm]:
        return [PauliTerm(c, s) for s, c in sorted(self._terms.items())]

    def items(self):
        return sorted(self._terms.items())

    def add(self, letters: str, coefficient: complex) -> None:
        c = self._terms.get(letters, 0.0) + coefficient
        if c == 0:
            self._terms.pop(letters, None)
        else:
            self._terms[letters] = c

    def prune(self, tol: float = 1e-14) -> "PauliSum":
        self._terms = {s: c for s, c in self._terms.items() if abs(c) > tol}
        return self

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.n != self.n:
            raise DimensionError("qubit count mismatch in Pauli sum addition")
        out = PauliSum(self.n, self._terms)
        for s, c in other._terms.items():
            out.add(s, c)
        return out

    def __mul__(self, other):
        if np.isscalar(other):
            return PauliSum(self.n, {s: c * other for s, c in self._terms.items()})
        if other.n != self.n:
            raise DimensionError("qubit count mismatch in Pauli sum product")
        out = PauliSum(self.n)
        for s1, c1 in self._terms.items():
            for s2, c2 in other._terms.items():
                phase = 1.0 + 0j
                letters = []
                for a, b in zip(s1, s2):
                    ph, c = _PAULI_PRODUCT[(a, b)]
                    phase *= ph
                    letters.append(c)
                out.add("".join(letters), c1 * c2 * phase)
        return out

    __rmul__ = __mul__

    def dagger(self) -> "PauliSum":
        return PauliSum(self.n, {s: np.conj(c) for s, c in self._terms.items()})

    def to_matrix(self) -> np.ndarray:
        """Dense matrix in the qubit-0-least-significant basis (test sizes only)."""
        dim = 1 << self.n
        out = np.zeros((dim, dim), dtype=complex)
        for letters, coeff in self._terms.items():
            m = np.array([[1.0]], dtype=complex)
            # qubit 0 is the LSB, so it is the rightmost kron factor
            for ch in reversed(letters):
                m = np.kron(m, _SINGLE_QUBIT_MATRICES[ch])
            out += coeff * m
        return out


@lru_cache(maxsize=16)
def _parity_table(n: int) -> np.ndarray:
    t = np.zeros(1 << n, dtype=np.int8)
    for i in range(1, 1 << n):
        t[i] = t[i >> 1] ^ (i & 1)
    return t


@lru_cache(maxsize=None)
def _string_action(letters: str) -> tuple[int, int, int]:
    """Return (flip_mask, phase_mask, y_count) for a Pauli string.

    ``P|j> = i**y_count * (-1)**popcount(j & phase_mask) |j ^ flip_mask>``.
    """
    flip = phase = ny = 0
    for q, ch in enumerate(letters):
        if ch in ("X", "Y"):
            flip |= 1 << q
        if ch in ("Z", "Y"):
            phase |= 1 << q
        if ch == "Y":
            ny += 1
    return flip, phase, ny


def _state_array(state) -> np.ndarray:
    data = getattr(state, "data", state)
    arr = np.asarray(data)
    if arr.ndim not in (1, 2):
        raise DimensionError("state must be a vector or a square matrix")
    if arr.ndim == 2 and arr.shape[0] != arr.shape[1]:
        raise DimensionError("density matrix must be square")
    return arr


def _string_expectation(arr: np.ndarray, letters: str) -> complex:
    n = len(letters)
    dim = 1 << n
    if arr.shape[0] != dim:
        raise DimensionError(f"state dimension {arr.shape[0]} != 2**{n}")
    flip, phase_mask, ny = _string_action(letters)
    idx = np.arange(dim)
    signs = 1.0 - 2.0 * _parity_table(n)[idx & phase_mask].astype(np.float64)
    phases = (1j ** ny) * signs
    if arr.ndim == 1:
        # <psi|P|psi> = sum_j conj(psi[j ^ flip]) * phi(j) * psi[j]
        return complex(np.dot(np.conj(arr[idx ^ flip]), phases * arr))
    # Tr(rho P) = sum_k rho[k, k ^ flip] * phi(k)
    return complex(np.dot(arr[idx, idx ^ flip], phases))


def pauli_expectation(state, op: PauliSum) -> complex:
    """Expectation value of a Pauli sum: ``<psi|P|psi>`` or ``Tr(rho P)``."""
    arr = _state_array(state)
    if arr.shape[0] != (1 << op.n):
        raise DimensionError(f"state dimension {arr.shape[0]} != 2**{op.n}")
    val = 0.0 + 0j
    for letters, coeff in op.items():
        val += coeff * _string_expectation(arr, letters)
    return val


@lru_cache(maxsize=None)
def _ladder_sum(orbital: int, dagger: bool, n: int) -> tuple[tuple[str, complex], ...]:
    z = "Z" * orbital
    pad = "I" * (n - orbital - 1)
    sign = -1j if dagger else 1j
    return ((z + "X" + pad, 0.5), (z + "Y" + pad, 0.5 * sign))


def jordan_wigner(term: FermionTerm, n: int) -> PauliSum:
    """Map a fermionic term to a qubit Pauli sum on ``n`` qubits."""
    for orb, _ in term.factors:
        if not 0 <= orb < n:
            raise IndexError(f"orbital index {orb} out of range for {n} qubits")
    out = PauliSum.identity(n, term.coefficient)
    for orb, dg in term.factors:
        factor = PauliSum(n, dict(_ladder_sum(orb, dg, n)))
        out = out * factor
    return out.prune()


def jordan_wigner_sum(terms: list[FermionTerm], n: int) -> PauliSum:
    """Jordan-Wigner image of a sum of fermionic terms."""
    out = PauliSum.zero(n)
    for t in terms:
        out = out + jordan_wigner(t, n)
    return out.prune()

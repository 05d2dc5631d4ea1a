"""Brute-force reference implementations used by tests and reference columns.

Everything here is built directly from the occupation-number action of the
ladder operators (bit arithmetic, no Pauli algebra), so agreement with the
optimized paths is meaningful evidence.  Deliberately slow and simple; capped
at 8 spin-orbitals.
"""
from __future__ import annotations

import numpy as np

MAX_ORBITALS = 8


def _check_size(r: int) -> None:
    if r > MAX_ORBITALS:
        raise ValueError(f"oracle is capped at {MAX_ORBITALS} spin-orbitals, got {r}")


def ladder_action(x: int, orbital: int, dagger: bool) -> tuple[int, int]:
    """Apply ``a_p`` or ``a_p†`` to basis state ``x``.

    Returns ``(y, sign)`` with sign in {-1, 0, +1}; sign 0 annihilates.
    The fermionic sign is the parity of occupied orbitals below ``p``.
    """
    bit = 1 << orbital
    occupied = bool(x & bit)
    if dagger == occupied:
        return 0, 0
    sign = -1 if bin(x & (bit - 1)).count("1") % 2 else 1
    return x ^ bit, sign


def apply_ladder_string(vec: np.ndarray, factors) -> np.ndarray:
    """Apply an ordered product of ladder operators (rightmost acts first)."""
    out = vec
    for orbital, dagger in reversed(list(factors)):
        nxt = np.zeros_like(out)
        for x in np.nonzero(out)[0]:
            y, sign = ladder_action(int(x), orbital, dagger)
            if sign:
                nxt[y] += sign * out[x]
        out = nxt
    return out


def ladder_matrix(orbital: int, r: int, dagger: bool) -> np.ndarray:
    """Dense matrix of a single ladder operator on the 2**r Fock space."""
    _check_size(r)
    dim = 1 << r
    m = np.zeros((dim, dim), dtype=complex)
    for x in range(dim):
        y, sign = ladder_action(x, orbital, dagger)
        if sign:
            m[y, x] = sign
    return m


def string_matrix(factors, r: int) -> np.ndarray:
    """Dense matrix of an ordered ladder-operator product."""
    _check_size(r)
    dim = 1 << r
    m = np.eye(dim, dtype=complex)
    for col in range(dim):
        m[:, col] = apply_ladder_string(np.eye(dim, dtype=complex)[:, col], factors)
    return m


def dense_hamiltonian(sys) -> np.ndarray:
    """Dense Fock-space Hamiltonian from a MolecularSystem.

    Uses the same stored-tensor convention as the rest of the package:
    ``H = sum h[i,j] a_i† a_j + sum V[p,q,r,s] a_p† a_q† a_s a_r + H_n``.
    """
    r = sys.r
    _check_size(r)
    dim = 1 << r
    H = np.zeros((dim, dim), dtype=complex)
    xs = np.arange(dim)
    for i in range(r):
        for j in range(r):
            if sys.h[i, j] == 0:
                continue
            _accumulate(H, ((i, True), (j, False)), sys.h[i, j], xs)
    for p in range(r):
        for q in range(r):
            for s in range(r):
                for t in range(r):
                    v = sys.V[p, q, s, t]
                    if v == 0:
                        continue
                    # V[p,q,r,s] pairs with a_p+ a_q+ a_s a_r; loop var t is "s"
                    _accumulate(H, ((p, True), (q, True), (t, False), (s, False)), v, xs)
    H += sys.nuclear * np.eye(dim)
    return H


def _accumulate(H: np.ndarray, factors, coeff: complex, xs: np.ndarray) -> None:
    for x in xs:
        y = int(x)
        sign = 1
        ok = True
        for orbital, dagger in reversed(factors):
            y, s = ladder_action(y, orbital, dagger)
            if s == 0:
                ok = False
                break
            sign *= s
        if ok:
            H[y, x] += coeff * sign


def particle_sector(r: int, n_electrons: int) -> np.ndarray:
    """Basis indices of the fixed-particle-number sector, ascending."""
    dim = 1 << r
    return np.array([x for x in range(dim) if bin(x).count("1") == n_electrons])


def fci_ground(sys) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of the dense Hamiltonian in the N-electron sector.

    Returns ``(energy, statevector)`` with the vector embedded in the full
    2**r space.  Degeneracies are resolved by picking the eigenvector with the
    largest weight on the lowest-index basis state, phase-fixed so that its
    largest-magnitude amplitude is real positive.
    """
    H = dense_hamiltonian(sys)
    sector = particle_sector(sys.r, sys.n_electrons)
    Hs = H[np.ix_(sector, sector)]
    vals, vecs = np.linalg.eigh(Hs)
    ground = vals[0]
    degenerate = np.nonzero(vals <= ground + 1e-10)[0]
    pick = degenerate[0]
    if len(degenerate) > 1:
        weights = [abs(vecs[0, k]) for k in degenerate]
        pick = degenerate[int(np.argmax(weights))]
    vec = vecs[:, pick]
    anchor = int(np.argmax(np.abs(vec)))
    phase = vec[anchor] / abs(vec[anchor])
    vec = vec / phase
    full = np.zeros(1 << sys.r, dtype=complex)
    full[sector] = vec
    return float(ground), full


def fci_spectrum(sys, k: int = 4) -> np.ndarray:
    """Lowest ``k`` eigenvalues of the N-electron sector."""
    H = dense_hamiltonian(sys)
    sector = particle_sector(sys.r, sys.n_electrons)
    vals = np.linalg.eigvalsh(H[np.ix_(sector, sector)])
    return vals[:k]


def exact_rdms(state: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray]:
    """1- and 2-RDM of a statevector by direct dense operator expectations.

    ``D1[i,j] = <a_i† a_j>`` and, in composite (p*r+q, r*r+s) indexing,
    ``D2[(p,q),(r,s)] = <a_p† a_q† a_s a_r>``.
    """
    _check_size(r)
    state = np.asarray(state, dtype=complex)
    d1 = np.zeros((r, r), dtype=complex)
    for i in range(r):
        for j in range(r):
            d1[i, j] = np.vdot(state, apply_ladder_string(state, ((i, True), (j, False))))
    d2 = np.zeros((r * r, r * r), dtype=complex)
    for p in range(r):
        for q in range(r):
            for u in range(r):
                for v in range(r):
                    op = ((p, True), (q, True), (v, False), (u, False))
                    d2[p * r + q, u * r + v] = np.vdot(state, apply_ladder_string(state, op))
    return d1, d2


def naive_intensity(d1: np.ndarray, d2: np.ndarray, S: np.ndarray,
                    c_n: float, n_e: float) -> tuple[float, float]:
    """Elastic/inelastic scattering intensities by literal quadruple loops."""
    r = d1.shape[0]
    linear = 0.0 + 0j
    for i in range(r):
        for j in range(r):
            linear += d1[i, j] * S[i, j]
    quad = 0.0 + 0j
    for i in range(r):
        for j in range(r):
            for k in range(r):
                for l in range(r):
                    quad += d1[i, j] * d1[k, l] * S[i, j] * np.conj(S[k, l])
    elastic = abs(c_n) ** 2 - 2.0 * c_n * linear + quad
    two_body = 0.0 + 0j
    for i in range(r):
        for j in range(r):
            for k in range(r):
                for l in range(r):
                    two_body += d2[i * r + j, k * r + l] * S[i, j] * np.conj(S[k, l])
    inelastic = n_e + two_body - quad
    return float(np.real(elastic)), float(np.real(inelastic))

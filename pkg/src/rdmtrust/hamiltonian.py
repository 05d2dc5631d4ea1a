"""Molecular integrals, qubit Hamiltonians, and reduced-Hamiltonian energies.

Stored-tensor convention: ``V[p,q,r,s]`` multiplies ``a_p† a_q† a_s a_r``
(so that it contracts index-by-index with the 2-RDM convention
``D[pq,rs] = <a_p† a_q† a_s a_r>``), and already includes the 1/2
prefactor of the standard two-body Hamiltonian.  The energy identity
``E = sum(h*D1) + sum(V*D2) + H_n`` is enforced by tests, not assumed.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .fermops import FermionTerm, PauliSum, jordan_wigner_sum


class FcidumpError(ValueError):
    """Raised for malformed FCIDUMP input."""


@dataclass
class MolecularSystem:
    """Second-quantized molecular problem in a spin-orbital basis."""

    r: int
    n_electrons: int
    h: np.ndarray
    V: np.ndarray
    nuclear: float
    label: str = ""

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=complex)
        self.V = np.asarray(self.V, dtype=complex)
        if self.h.shape != (self.r, self.r):
            raise ValueError("one-electron tensor shape mismatch")
        if self.V.shape != (self.r,) * 4:
            raise ValueError("two-electron tensor shape mismatch")
        if np.max(np.abs(self.h - self.h.conj().T)) > 1e-10:
            raise ValueError("one-electron tensor is not Hermitian")

    @property
    def n_qubits(self) -> int:
        return self.r


@dataclass
class ReducedHamiltonian:
    """Two-body reduced Hamiltonian: ``E = sum(K*D2) + constant``.

    ``matrix`` is r^2 x r^2 Hermitian in composite (p*r+q),(u*r+v) indexing,
    projected onto the antisymmetric pair-index subspace (which leaves the
    contraction with any antisymmetric 2-RDM unchanged).
    """

    matrix: np.ndarray
    constant: float = 0.0

    @property
    def r(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))


_NAMELIST_KV = re.compile(r"([A-Za-z0-9_]+)\s*=\s*([^=]*?)(?=(?:[A-Za-z0-9_]+\s*=)|$)")


def _parse_namelist(header: str) -> dict[str, str]:
    body = header.strip()
    body = re.sub(r"^&[A-Za-z]+", "", body).strip()
    out = {}
    for key, val in _NAMELIST_KV.findall(body):
        out[key.upper()] = val.strip().rstrip(",").strip()
    return out


def _tofloat(token: str) -> float:
    return float(token.replace("D", "E").replace("d", "e"))


def parse_fcidump(text: str, label: str = "") -> MolecularSystem:
    """Parse FCIDUMP text into a spin-orbital MolecularSystem.

    Spatial chemist-notation integrals (ij|kl) are expanded to interleaved
    spin-orbitals (alpha even, beta odd) and converted to the stored
    convention ``V[p,q,r,s] = (1/2) <pq|rs>``.
    """
    lines = text.splitlines()
    header_lines: list[str] = []
    data_start = None
    for k, line in enumerate(lines):
        stripped = line.strip()
        if not stripped:
            continue
        if data_start is None:
            header_lines.append(stripped)
            if "&END" in stripped.upper() or stripped.endswith("/"):
                data_start = k + 1
    if data_start is None:
        raise FcidumpError("unterminated FCIDUMP namelist header")
    header = " ".join(header_lines)
    if not header.upper().lstrip().startswith("&FCI"):
        raise FcidumpError("missing &FCI namelist")
    fields = _parse_namelist(header.replace("&END", "").rstrip("/"))
    try:
        norb = int(fields["NORB"])
        nelec = int(fields["NELEC"])
    except KeyError as exc:
        raise FcidumpError(f"header is missing {exc.args[0]}") from None

    h_sp = np.zeros((norb, norb))
    eri = np.zeros((norb, norb, norb, norb))
    nuclear = None
    for line in lines[data_start:]:
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise FcidumpError(f"malformed integral record: {line!r}")
        val = _tofloat(tokens[0])
        i, j, k, l = (int(t) for t in tokens[1:])
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise FcidumpError(f"orbital index {idx} exceeds NORB={norb}")
        if i == j == k == l == 0:
            nuclear = val
        elif k == 0 and l == 0:
            if j == 0:
                continue  # orbital-energy record, not used
            h_sp[i - 1, j - 1] = val
            h_sp[j - 1, i - 1] = val
        else:
            if min(i, j, k, l) == 0:
                raise FcidumpError(f"partially zero index quadruple: {line!r}")
            for a, b, c, d in _chemist_permutations(i - 1, j - 1, k - 1, l - 1):
                eri[a, b, c, d] = val
    if nuclear is None:
        raise FcidumpError("missing nuclear-constant record (0 0 0 0)")

    r = 2 * norb
    h = np.zeros((r, r))
    V = np.zeros((r, r, r, r))
    for p in range(r):
        for q in range(r):
            if p % 2 == q % 2:
                h[p, q] = h_sp[p // 2, q // 2]
    # V[p,q,u,v] = (1/2) <pq|uv> = (1/2) (PU|QV) delta(sp,su) delta(sq,sv)
    for p in range(r):
        for q in range(r):
            for u in range(r):
                if p % 2 != u % 2:
                    continue
                for v in range(r):
                    if q % 2 != v % 2:
                        continue
                    V[p, q, u, v] = 0.5 * eri[p // 2, u // 2, q // 2, v // 2]
    return MolecularSystem(r=r, n_electrons=nelec, h=h, V=V, nuclear=nuclear, label=label)


def _chemist_permutations(i, j, k, l):
    return {
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    }


def load_fcidump(path, label: str | None = None) -> MolecularSystem:
    with open(path) as fh:
        return parse_fcidump(fh.read(), label=label if label is not None else str(path))


def hamiltonian_fermion_terms(sys: MolecularSystem) -> list[FermionTerm]:
    """The second-quantized Hamiltonian as a list of fermionic terms."""
    terms = [FermionTerm(complex(sys.nuclear))]
    for i in range(sys.r):
        for j in range(sys.r):
            if sys.h[i, j] != 0:
                terms.append(FermionTerm(complex(sys.h[i, j]), ((i, True), (j, False))))
    for p in range(sys.r):
        for q in range(sys.r):
            for u in range(sys.r):
                for v in range(sys.r):
                    coeff = sys.V[p, q, u, v]
                    if coeff != 0:
                        terms.append(FermionTerm(
                            complex(coeff), ((p, True), (q, True), (v, False), (u, False))))
    return terms


def build_qubit_hamiltonian(sys: MolecularSystem) -> PauliSum:
    """Jordan-Wigner qubit Hamiltonian of the molecular system."""
    return jordan_wigner_sum(hamiltonian_fermion_terms(sys), sys.r).prune(1e-13)


def pair_swap(r: int) -> np.ndarray:
    """Permutation matrix exchanging composite indices (p,q) -> (q,p)."""
    s = np.zeros((r * r, r * r))
    for p in range(r):
        for q in range(r):
            s[p * r + q, q * r + p] = 1.0
    return s


def antisymmetric_projector(r: int) -> np.ndarray:
    """Orthogonal projector onto the pair-antisymmetric subspace."""
    return 0.5 * (np.eye(r * r) - pair_swap(r))


def build_reduced_hamiltonian(sys: MolecularSystem) -> ReducedHamiltonian:
    """Two-body reduced Hamiltonian K with ``sum(K*D2) + H_n`` the energy.

    The one-body part folds h into the two-body tensor through the 2-RDM
    contraction identity; the result is projected onto the antisymmetric
    pair-index subspace, where the SDP variable lives.
    """
    if sys.n_electrons < 2:
        raise ValueError("reduced Hamiltonian requires at least 2 electrons")
    r = sys.r
    eye = np.eye(r)
    scale = 1.0 / (2.0 * (sys.n_electrons - 1))
    k4 = scale * (np.einsum("pu,qv->pquv", sys.h, eye)
                  + np.einsum("qv,pu->pquv", sys.h, eye)) + sys.V
    k = k4.reshape(r * r, r * r)
    proj = antisymmetric_projector(r)
    k = proj @ k @ proj
    k = 0.5 * (k + k.conj().T)
    if np.max(np.abs(k.imag)) < 1e-12:
        k = k.real.astype(float)
    return ReducedHamiltonian(matrix=k, constant=float(sys.nuclear))


def energy_from_rdms(d1: np.ndarray, d2: np.ndarray, sys: MolecularSystem) -> float:
    """Total energy from measured RDMs: ``sum(h*D1) + sum(V*D2) + H_n``."""
    d1 = np.asarray(d1)
    if d1.shape != (sys.r, sys.r):
        raise ValueError("1-RDM dimension mismatch")
    d2m = np.asarray(d2)
    if d2m.shape != (sys.r ** 2, sys.r ** 2):
        raise ValueError("2-RDM dimension mismatch")
    v_mat = sys.V.reshape(sys.r ** 2, sys.r ** 2)
    e = np.sum(sys.h * d1) + np.sum(v_mat * d2m) + sys.nuclear
    return float(np.real(e))


def reduced_energy(k: ReducedHamiltonian, d2: np.ndarray) -> float:
    """Energy from the reduced Hamiltonian: ``sum(K*D2) + constant``."""
    return float(np.real(np.sum(k.matrix * np.asarray(d2))) + k.constant)

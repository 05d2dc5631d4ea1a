"""Reduced density matrices: measurement, Q/G images, constraint checks, IO.

Index conventions (shared by every module):

* ``D1[i, j] = <a_i† a_j>``
* ``D2[(p,q),(r,s)] = <a_p† a_q† a_s a_r>`` with composite row-major
  pairs ``(p,q) -> p*r + q``
* ``Q[(p,q),(r,s)] = <a_p a_q a_s† a_r†>`` (two-hole matrix)
* ``G[(p,q),(r,s)] = <a_p† a_q a_s† a_r>`` (particle-hole matrix)

The mirrored operator order on the column pair makes each matrix the Gram
matrix of the corresponding pair excitations, hence positive semidefinite for
any state.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fermops import FermionTerm, jordan_wigner, _state_array, _string_expectation


@dataclass
class Rdm1:
    """One-electron RDM, ``d[i, j] = <a_i† a_j>``."""

    d: np.ndarray

    @property
    def r(self) -> int:
        return self.d.shape[0]


@dataclass
class Rdm2:
    """Two-electron RDM as an r^2 x r^2 matrix in composite pair indexing."""

    d: np.ndarray

    @property
    def r(self) -> int:
        return int(round(np.sqrt(self.d.shape[0])))

    @property
    def tensor(self) -> np.ndarray:
        r = self.r
        return self.d.reshape(r, r, r, r)


def _as_matrix(x) -> np.ndarray:
    return np.asarray(x.d if isinstance(x, (Rdm1, Rdm2)) else x)


class _ExpectationCache:
    """Caches per-Pauli-string expectations, optionally with Gaussian shot noise.

    Noise is drawn once per unique string in encounter order, so results are
    bitwise reproducible for a fixed (shots, seed) and the same string is
    never "measured" twice.
    """

    def __init__(self, state_arr: np.ndarray, shots: int | None, seed: int | None):
        self.arr = state_arr
        self.sigma = 0.0 if not shots else 1.0 / np.sqrt(shots)
        if shots is not None and shots <= 0:
            raise ValueError("shots must be positive")
        self.rng = np.random.default_rng(seed) if shots else None
        self.cache: dict[str, float] = {}

    def string_value(self, letters: str) -> float:
        if set(letters) == {"I"}:
            return 1.0
        if letters not in self.cache:
            val = float(np.real(_string_expectation(self.arr, letters)))
            if self.rng is not None:
                val += self.sigma * self.rng.standard_normal()
            self.cache[letters] = val
        return self.cache[letters]

    def fermion_expectation(self, factors, n: int) -> complex:
        op = jordan_wigner(FermionTerm(1.0, tuple(factors)), n)
        return complex(sum(c * self.string_value(s) for s, c in op.items()))


def measure_rdms(state, r: int, shots: int | None = None,
                 seed: int | None = None) -> tuple[Rdm1, Rdm2]:
    """Measure 1- and 2-RDMs of a state via Jordan-Wigner Pauli expectations.

    Only the independent elements are measured; the rest follow from the
    operator identities (Hermiticity and pair antisymmetry), exactly as they
    would on hardware.  With ``shots`` given, each unique Pauli expectation
    gets independent Gaussian noise of standard deviation ``1/sqrt(shots)``.
    """
    arr = _state_array(state)
    if arr.shape[0] != (1 << r):
        raise ValueError(f"state dimension {arr.shape[0]} != 2**{r}")
    cache = _ExpectationCache(arr, shots, seed)

    d1 = np.zeros((r, r), dtype=complex)
    for i in range(r):
        for j in range(i, r):
            val = cache.fermion_expectation(((i, True), (j, False)), r)
            d1[i, j] = val
            d1[j, i] = np.conj(val)

    d2 = np.zeros((r * r, r * r), dtype=complex)
    pairs = [(p, q) for p in range(r) for q in range(p + 1, r)]
    for a, (p, q) in enumerate(pairs):
        for p2, q2 in pairs[a:]:
            val = cache.fermion_expectation(
                ((p, True), (q, True), (q2, False), (p2, False)), r)
            _fill_pair_element(d2, r, p, q, p2, q2, val)
    return Rdm1(d1), Rdm2(d2)


def _fill_pair_element(d2, r, p, q, u, v, val):
    for (a, b), s1 in (((p, q), 1.0), ((q, p), -1.0)):
        for (c, e), s2 in (((u, v), 1.0), ((v, u), -1.0)):
            d2[a * r + b, c * r + e] = s1 * s2 * val
            d2[c * r + e, a * r + b] = np.conj(s1 * s2 * val)


def contract_to_rdm1(d2, n_electrons: int) -> Rdm1:
    """Contract the 2-RDM to the 1-RDM: ``d[i,j] = sum_k D[(i,k),(j,k)]/(N-1)``."""
    if n_electrons < 2:
        raise ValueError("contraction requires at least 2 electrons")
    m = _as_matrix(d2)
    r = int(round(np.sqrt(m.shape[0])))
    t = m.reshape(r, r, r, r)
    return Rdm1(np.einsum("ikjk->ij", t) / (n_electrons - 1))


def build_q(d2, d1, r: int, n_electrons: int | None = None) -> np.ndarray:
    """Two-hole matrix ``Q[(p,q),(r,s)] = <a_p a_q a_s† a_r†>``.

    Built as the affine image of (D1, D2) given by the canonical
    anticommutation relations, so it applies to noisy or corrected RDMs just
    as well as to exact ones.
    """
    D2 = _as_matrix(d2)
    D1 = _as_matrix(d1)
    if D1.shape != (r, r) or D2.shape != (r * r, r * r):
        raise ValueError("RDM dimension mismatch")
    eye = np.eye(r)
    t = D2.reshape(r, r, r, r)
    q4 = (np.einsum("pr,qs->pqrs", eye, eye)
          - np.einsum("ps,qr->pqrs", eye, eye)
          - np.einsum("qs,rp->pqrs", eye, D1)
          + np.einsum("ps,rq->pqrs", eye, D1)
          + np.einsum("qr,sp->pqrs", eye, D1)
          - np.einsum("pr,sq->pqrs", eye, D1)
          + np.einsum("srqp->pqrs", t))
    return q4.reshape(r * r, r * r)


def build_g(d2, d1, r: int) -> np.ndarray:
    """Particle-hole matrix ``G[(p,q),(r,s)] = <a_p† a_q a_s† a_r>``."""
    D2 = _as_matrix(d2)
    D1 = _as_matrix(d1)
    if D1.shape != (r, r) or D2.shape != (r * r, r * r):
        raise ValueError("RDM dimension mismatch")
    eye = np.eye(r)
    t = D2.reshape(r, r, r, r)
    g4 = np.einsum("qs,pr->pqrs", eye, D1) - np.einsum("psrq->pqrs", t)
    return g4.reshape(r * r, r * r)


def frobenius_distance(a, b) -> float:
    """Frobenius norm of the elementwise difference of two RDMs."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError("RDM shape mismatch")
    return float(np.linalg.norm(ma - mb))


@dataclass
class ConstraintReport:
    """Residuals of the N-representability constraint set."""

    hermiticity: float
    antisymmetry: float
    trace_d1: float
    trace_d2: float
    contraction: float
    min_eig_d: float
    min_eig_q: float
    min_eig_g: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = all(v <= self.tol for v in self.residuals().values())

    def residuals(self) -> dict[str, float]:
        return {
            "hermiticity": self.hermiticity,
            "antisymmetry": self.antisymmetry,
            "trace_d1": self.trace_d1,
            "trace_d2": self.trace_d2,
            "contraction": self.contraction,
            "negativity_d": max(0.0, -self.min_eig_d),
            "negativity_q": max(0.0, -self.min_eig_q),
            "negativity_g": max(0.0, -self.min_eig_g),
        }

    def as_dict(self) -> dict:
        out = dict(self.residuals())
        out.update(min_eig_d=self.min_eig_d, min_eig_q=self.min_eig_q,
                   min_eig_g=self.min_eig_g, tol=self.tol, passed=self.passed)
        return out


def check_nrep(d1, d2, n_electrons: int, tol: float = 1e-8) -> ConstraintReport:
    """Evaluate every DQG N-representability residual against ``tol``."""
    D1 = _as_matrix(d1)
    D2 = _as_matrix(d2)
    r = D1.shape[0]
    if D2.shape != (r * r, r * r):
        raise ValueError("RDM dimension mismatch")
    t = D2.reshape(r, r, r, r)
    herm = max(float(np.max(np.abs(D1 - D1.conj().T))),
               float(np.max(np.abs(D2 - D2.conj().T))))
    antisym = max(float(np.max(np.abs(t + np.einsum("qprs->pqrs", t)))),
                  float(np.max(np.abs(t + np.einsum("pqsr->pqrs", t)))))
    tr1 = abs(float(np.real(np.trace(D1))) - n_electrons)
    tr2 = abs(float(np.real(np.trace(D2))) - n_electrons * (n_electrons - 1))
    contr = float(np.linalg.norm(contract_to_rdm1(D2, n_electrons).d - D1))
    eig_d = float(np.linalg.eigvalsh(0.5 * (D2 + D2.conj().T))[0])
    q = build_q(D2, D1, r)
    g = build_g(D2, D1, r)
    eig_q = float(np.linalg.eigvalsh(0.5 * (q + q.conj().T))[0])
    eig_g = float(np.linalg.eigvalsh(0.5 * (g + g.conj().T))[0])
    return ConstraintReport(herm, antisym, tr1, tr2, contr, eig_d, eig_q, eig_g, tol)


# --- plain-text RDM files ----------------------------------------------------

def save_rdm(path, rdm, n_electrons: int, kind: str | None = None) -> None:
    """Write an RDM in the text format ``r N kind`` then indexed rows."""
    m = _as_matrix(rdm)
    if kind is None:
        if isinstance(rdm, Rdm1):
            kind = "rdm1"
        elif isinstance(rdm, Rdm2):
            kind = "rdm2"
        else:
            raise ValueError("kind required for bare arrays")
    if kind not in ("rdm1", "rdm2"):
        raise ValueError(f"unknown RDM kind {kind!r}")
    r = m.shape[0] if kind == "rdm1" else int(round(np.sqrt(m.shape[0])))
    lines = [f"{r} {n_electrons} {kind}"]
    if kind == "rdm1":
        for i in range(r):
            for j in range(r):
                lines.append(f"{i} {j} {m[i, j].real:.17g} {m[i, j].imag:.17g}")
    else:
        for p in range(r):
            for q in range(r):
                for u in range(r):
                    for v in range(r):
                        z = m[p * r + q, u * r + v]
                        lines.append(f"{p} {q} {u} {v} {z.real:.17g} {z.imag:.17g}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_rdm(path):
    """Read an RDM text file; returns ``(rdm, n_electrons)``."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3 or header[2] not in ("rdm1", "rdm2"):
            raise ValueError(f"malformed RDM header in {path}")
        r, n_electrons, kind = int(header[0]), int(header[1]), header[2]
        dim = r if kind == "rdm1" else r * r
        m = np.zeros((dim, dim), dtype=complex)
        for line in fh:
            tokens = line.split()
            if not tokens:
                continue
            if kind == "rdm1":
                i, j = int(tokens[0]), int(tokens[1])
                m[i, j] = float(tokens[2]) + 1j * float(tokens[3])
            else:
                p, q, u, v = (int(t) for t in tokens[:4])
                m[p * r + q, u * r + v] = float(tokens[4]) + 1j * float(tokens[5])
    rdm = Rdm1(m) if kind == "rdm1" else Rdm2(m)
    return rdm, n_electrons

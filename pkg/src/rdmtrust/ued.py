"""Elastic and inelastic electron-diffraction intensities from RDMs.

The diffraction integrals S(s) are inputs, never computed here; synthetic
tables generated by a seeded script are committed under fixtures/.  With
Hermitian S matrices and Hermitian RDMs all intensities are real.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rdm import _as_matrix


@dataclass
class DiffractionTable:
    """Momentum-transfer grid with one r x r integral matrix per s value."""

    s_values: np.ndarray
    matrices: list[np.ndarray]
    c_n: float
    n_e: float

    def __post_init__(self):
        self.s_values = np.asarray(self.s_values, dtype=float)
        self.matrices = [np.asarray(m, dtype=complex) for m in self.matrices]
        if len(self.s_values) != len(self.matrices):
            raise ValueError("one matrix required per s value")
        if np.any(np.diff(self.s_values) <= 0):
            raise ValueError("s values must be strictly increasing")
        if self.matrices:
            r = self.matrices[0].shape[0]
            for m in self.matrices:
                if m.shape != (r, r):
                    raise ValueError("inconsistent diffraction matrix dimensions")

    @property
    def r(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 0


def _real_part(value: complex, what: str) -> float:
    scale = max(1.0, abs(value))
    if abs(value.imag) > 1e-6 * scale:
        raise ValueError(f"{what} has a non-negligible imaginary part {value.imag:.3e}")
    return float(value.real)


def elastic_intensity(d1, S: np.ndarray, c_n: float) -> float:
    """|C_N|^2 - 2 C_N sum(D1*S) + |sum(D1*S)|^2-structured quartic term."""
    D1 = _as_matrix(d1)
    S = np.asarray(S)
    if D1.shape != S.shape:
        raise ValueError("D1 and S dimension mismatch")
    linear = np.sum(D1 * S)
    quad = linear * np.sum(D1 * np.conj(S))
    value = abs(c_n) ** 2 - 2.0 * c_n * linear + quad
    return _real_part(complex(value), "elastic intensity")


def inelastic_intensity(d1, d2, S: np.ndarray, n_e: float) -> float:
    """n_e + sum(D2[(ij),(kl)] S_ij S*_kl) - sum(D1 D1 S S*)."""
    D1 = _as_matrix(d1)
    D2 = _as_matrix(d2)
    S = np.asarray(S)
    r = D1.shape[0]
    if S.shape != (r, r) or D2.shape != (r * r, r * r):
        raise ValueError("RDM and S dimension mismatch")
    s_vec = S.reshape(-1)
    two_body = s_vec.conj() @ D2.T @ s_vec
    linear = np.sum(D1 * S)
    quad = linear * np.sum(D1 * np.conj(S))
    value = n_e + two_body - quad
    return _real_part(complex(value), "inelastic intensity")


def intensity_curve(d1, d2, table: DiffractionTable) -> list[tuple[float, float, float, float]]:
    """Per-s (s, elastic, inelastic, total) rows, in ascending s order."""
    rows = []
    for s, S in zip(table.s_values, table.matrices):
        el = elastic_intensity(d1, S, table.c_n)
        inel = inelastic_intensity(d1, d2, S, table.n_e)
        rows.append((float(s), el, inel, el + inel))
    return rows


def save_diffraction_table(path, table: DiffractionTable) -> None:
    lines = [f"r {table.r}", f"c_n {table.c_n:.17g}", f"n_e {table.n_e:.17g}"]
    for s, m in zip(table.s_values, table.matrices):
        lines.append(f"s {s:.17g}")
        for row in m:
            lines.append(" ".join(f"{z.real:.17g} {z.imag:.17g}" for z in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_diffraction_table(path) -> DiffractionTable:
    """Parse and validate the text table format (see save_diffraction_table)."""
    with open(path) as fh:
        lines = [l.strip() for l in fh if l.strip() and not l.startswith("#")]
    if len(lines) < 3 or not lines[0].startswith("r "):
        raise ValueError("malformed diffraction table header")
    r = int(lines[0].split()[1])
    c_n = float(lines[1].split()[1])
    n_e = float(lines[2].split()[1])
    s_values: list[float] = []
    matrices: list[np.ndarray] = []
    k = 3
    while k < len(lines):
        if not lines[k].startswith("s "):
            raise ValueError(f"expected 's <value>' block header, got {lines[k]!r}")
        s_values.append(float(lines[k].split()[1]))
        block = lines[k + 1:k + 1 + r]
        if len(block) != r:
            raise ValueError("truncated diffraction matrix block")
        m = np.zeros((r, r), dtype=complex)
        for i, row in enumerate(block):
            nums = [float(t) for t in row.split()]
            if len(nums) != 2 * r:
                raise ValueError("diffraction matrix row has wrong width")
            m[i] = np.array(nums[0::2]) + 1j * np.array(nums[1::2])
        matrices.append(m)
        k += 1 + r
    return DiffractionTable(np.array(s_values), matrices, c_n, n_e)

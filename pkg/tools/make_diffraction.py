#!/usr/bin/env python3
"""Generate the committed synthetic diffraction table for the H2 fixtures.

Seeded random-smooth-matrix construction: each spatial matrix element is a
fixed linear combination of smooth envelope functions of s, expanded to the
interleaved spin-orbital basis (spin-diagonal, real symmetric, so intensities
stay real).  Eleven s points on [0.5, 1.5] inverse Angstrom.
"""
from __future__ import annotations

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from rdmtrust.ued import DiffractionTable, save_diffraction_table  # noqa: E402

SEED = 20240811
N_SPATIAL = 2
N_POINTS = 11
S_MIN, S_MAX = 0.5, 1.5
C_N = 2.0
N_E = 2.0


def spatial_matrix(s: float, amps: np.ndarray, widths: np.ndarray, centers: np.ndarray) -> np.ndarray:
    m = np.zeros((N_SPATIAL, N_SPATIAL))
    for k in range(amps.shape[0]):
        env = np.exp(-((s - centers[k]) / widths[k]) ** 2)
        m += amps[k] * env
    return 0.5 * (m + m.T)


def main():
    rng = np.random.default_rng(SEED)
    n_env = 3
    amps = rng.uniform(-0.6, 0.6, size=(n_env, N_SPATIAL, N_SPATIAL))
    widths = rng.uniform(0.5, 1.2, size=n_env)
    centers = rng.uniform(0.3, 1.7, size=n_env)
    s_values = np.linspace(S_MIN, S_MAX, N_POINTS)
    matrices = []
    for s in s_values:
        spatial = spatial_matrix(s, amps, widths, centers)
        r = 2 * N_SPATIAL
        so = np.zeros((r, r))
        for p in range(r):
            for q in range(r):
                if p % 2 == q % 2:
                    so[p, q] = spatial[p // 2, q // 2]
        matrices.append(so)
    table = DiffractionTable(s_values, matrices, C_N, N_E)
    out = os.path.join(os.path.dirname(__file__), "..", "fixtures", "diffraction")
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "h2_synthetic.dtab")
    save_diffraction_table(path, table)
    print(f"wrote {path}: r={table.r}, {len(s_values)} points on [{S_MIN}, {S_MAX}]")


if __name__ == "__main__":
    main()

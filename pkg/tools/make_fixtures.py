#!/usr/bin/env python3
"""One-off generator for the committed FCIDUMP fixtures.

This script plays the role of the external quantum-chemistry oracle: it
evaluates STO-3G integrals (McMurchie-Davidson scheme), runs restricted
Hartree-Fock, optionally reduces to a frozen-core active space, and writes
FCIDUMP files under fixtures/fcidump/.  It is a tool, not part of the
installed package; the package only ever reads the committed files.

Run from the repository root:

    python tools/make_fixtures.py --check   # regenerate + validate

Validation targets (see fixtures/PROVENANCE.md):
  * H atom STO-3G:        E = -0.46658185 Ha (exact for this basis)
  * H2 @ 0.735 A FCI:     E = -1.1373060 Ha
  * H2 @ 0.7414 A FCI:    E = -1.1372838 Ha
  * LiH @ 1.5949 A FCI:   E = -7.8823 Ha (full 6-orbital space, loose check)
"""
from __future__ import annotations

import argparse
import itertools
import math
import os
import sys

import numpy as np
from scipy.special import hyp1f1

BOHR_PER_ANGSTROM = 1.0 / 0.52917721092

# STO-3G exponents / contraction coefficients (EMSL basis-set exchange)
STO3G = {
    "H": [("s", [3.425250914, 0.6239137298, 0.1688554040],
           [0.1543289673, 0.5353281423, 0.4446345422])],
    "Li": [("s", [16.11957475, 2.936200663, 0.7946504870],
            [0.1543289673, 0.5353281423, 0.4446345422]),
           ("s", [0.6362897469, 0.1478600533, 0.0480886784],
            [-0.09996722919, 0.3995128261, 0.7001154689]),
           ("p", [0.6362897469, 0.1478600533, 0.0480886784],
            [0.1559162750, 0.6076837186, 0.3919573931])],
}
CHARGES = {"H": 1, "Li": 3}


def boys(n, T):
    return hyp1f1(n + 0.5, n + 1.5, -T) / (2.0 * n + 1.0)


def hermite_e(i, j, t, Qx, a, b, memo=None):
    """Hermite expansion coefficient E_t^{ij} (McMurchie-Davidson)."""
    if memo is None:
        memo = {}
    key = (i, j, t)
    if key in memo:
        return memo[key]
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        val = 0.0
    elif i == j == t == 0:
        val = math.exp(-q * Qx * Qx)
    elif j == 0:
        val = (1.0 / (2 * p)) * hermite_e(i - 1, j, t - 1, Qx, a, b, memo) \
            - (q * Qx / a) * hermite_e(i - 1, j, t, Qx, a, b, memo) \
            + (t + 1) * hermite_e(i - 1, j, t + 1, Qx, a, b, memo)
    else:
        val = (1.0 / (2 * p)) * hermite_e(i, j - 1, t - 1, Qx, a, b, memo) \
            + (q * Qx / b) * hermite_e(i, j - 1, t, Qx, a, b, memo) \
            + (t + 1) * hermite_e(i, j - 1, t + 1, Qx, a, b, memo)
    memo[key] = val
    return val


def hermite_coulomb(t, u, v, n, p, PC, RPC, memo=None):
    if memo is None:
        memo = {}
    key = (t, u, v, n)
    if key in memo:
        return memo[key]
    T = p * RPC * RPC
    if t == u == v == 0:
        val = (-2.0 * p) ** n * boys(n, T)
    elif t == u == 0:
        val = PC[2] * hermite_coulomb(t, u, v - 1, n + 1, p, PC, RPC, memo)
        if v > 1:
            val += (v - 1) * hermite_coulomb(t, u, v - 2, n + 1, p, PC, RPC, memo)
    elif t == 0:
        val = PC[1] * hermite_coulomb(t, u - 1, v, n + 1, p, PC, RPC, memo)
        if u > 1:
            val += (u - 1) * hermite_coulomb(t, u - 2, v, n + 1, p, PC, RPC, memo)
    else:
        val = PC[0] * hermite_coulomb(t - 1, u, v, n + 1, p, PC, RPC, memo)
        if t > 1:
            val += (t - 1) * hermite_coulomb(t - 2, u, v, n + 1, p, PC, RPC, memo)
    memo[key] = val
    return val


def prim_overlap(a, lmn1, A, b, lmn2, B):
    s = (math.pi / (a + b)) ** 1.5
    for d in range(3):
        s *= hermite_e(lmn1[d], lmn2[d], 0, A[d] - B[d], a, b)
    return s


def prim_kinetic(a, lmn1, A, b, lmn2, B):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * prim_overlap(a, lmn1, A, b, lmn2, B)
    term1 = -2.0 * b * b * (
        prim_overlap(a, lmn1, A, b, (l2 + 2, m2, n2), B)
        + prim_overlap(a, lmn1, A, b, (l2, m2 + 2, n2), B)
        + prim_overlap(a, lmn1, A, b, (l2, m2, n2 + 2), B))
    term2 = -0.5 * (
        l2 * (l2 - 1) * prim_overlap(a, lmn1, A, b, (l2 - 2, m2, n2), B)
        + m2 * (m2 - 1) * prim_overlap(a, lmn1, A, b, (l2, m2 - 2, n2), B)
        + n2 * (n2 - 1) * prim_overlap(a, lmn1, A, b, (l2, m2, n2 - 2), B))
    return term0 + term1 + term2


def prim_nuclear(a, lmn1, A, b, lmn2, B, C):
    p = a + b
    P = (a * A + b * B) / p
    PC = P - C
    RPC = float(np.linalg.norm(PC))
    ex = [{}, {}, {}]
    memo = {}
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        e1 = hermite_e(lmn1[0], lmn2[0], t, A[0] - B[0], a, b, ex[0])
        for u in range(lmn1[1] + lmn2[1] + 1):
            e2 = hermite_e(lmn1[1], lmn2[1], u, A[1] - B[1], a, b, ex[1])
            for v in range(lmn1[2] + lmn2[2] + 1):
                e3 = hermite_e(lmn1[2], lmn2[2], v, A[2] - B[2], a, b, ex[2])
                val += e1 * e2 * e3 * hermite_coulomb(t, u, v, 0, p, PC, RPC, memo)
    return 2.0 * math.pi / p * val


def prim_eri(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * A + b * B) / p
    Q = (c * C + d * D) / q
    PQ = P - Q
    RPQ = float(np.linalg.norm(PQ))
    memo = {}
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        e1 = hermite_e(lmn1[0], lmn2[0], t, A[0] - B[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            e2 = hermite_e(lmn1[1], lmn2[1], u, A[1] - B[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                e3 = hermite_e(lmn1[2], lmn2[2], v, A[2] - B[2], a, b)
                pre = e1 * e2 * e3
                if pre == 0.0:
                    continue
                for tt in range(lmn3[0] + lmn4[0] + 1):
                    f1 = hermite_e(lmn3[0], lmn4[0], tt, C[0] - D[0], c, d)
                    for uu in range(lmn3[1] + lmn4[1] + 1):
                        f2 = hermite_e(lmn3[1], lmn4[1], uu, C[1] - D[1], c, d)
                        for vv in range(lmn3[2] + lmn4[2] + 1):
                            f3 = hermite_e(lmn3[2], lmn4[2], vv, C[2] - D[2], c, d)
                            sign = (-1.0) ** (tt + uu + vv)
                            val += pre * f1 * f2 * f3 * sign * hermite_coulomb(
                                t + tt, u + uu, v + vv, 0, alpha, PQ, RPQ, memo)
    return val * 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))


def prim_norm(a, lmn):
    l, m, n = lmn
    df = lambda k: math.prod(range(2 * k - 1, 0, -2)) if k > 0 else 1
    return ((2 * a / math.pi) ** 0.75
            * math.sqrt((4 * a) ** (l + m + n) / (df(l) * df(m) * df(n))))


class BasisFunction:
    """Contracted Cartesian Gaussian with normalized contraction."""

    def __init__(self, center, lmn, exps, coefs):
        self.center = np.asarray(center, dtype=float)
        self.lmn = tuple(lmn)
        self.exps = list(exps)
        self.coefs = [c * prim_norm(a, lmn) for a, c in zip(exps, coefs)]
        s = 0.0
        for ai, ci in zip(self.exps, self.coefs):
            for aj, cj in zip(self.exps, self.coefs):
                s += ci * cj * prim_overlap(ai, self.lmn, self.center, aj, self.lmn, self.center)
        self.coefs = [c / math.sqrt(s) for c in self.coefs]


def build_basis(atoms):
    basis = []
    for symbol, center in atoms:
        for shell, exps, coefs in STO3G[symbol]:
            if shell == "s":
                basis.append(BasisFunction(center, (0, 0, 0), exps, coefs))
            else:
                for lmn in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                    basis.append(BasisFunction(center, lmn, exps, coefs))
    return basis


def contracted(fn, b1, b2, *extra):
    val = 0.0
    for a1, c1 in zip(b1.exps, b1.coefs):
        for a2, c2 in zip(b2.exps, b2.coefs):
            val += c1 * c2 * fn(a1, b1.lmn, b1.center, a2, b2.lmn, b2.center, *extra)
    return val


def one_electron_integrals(basis, atoms):
    nb = len(basis)
    S = np.zeros((nb, nb))
    T = np.zeros((nb, nb))
    Vne = np.zeros((nb, nb))
    for i in range(nb):
        for j in range(i + 1):
            S[i, j] = S[j, i] = contracted(prim_overlap, basis[i], basis[j])
            T[i, j] = T[j, i] = contracted(prim_kinetic, basis[i], basis[j])
            v = 0.0
            for symbol, center in atoms:
                v -= CHARGES[symbol] * contracted(
                    prim_nuclear, basis[i], basis[j], np.asarray(center, dtype=float))
            Vne[i, j] = Vne[j, i] = v
    return S, T, Vne


def two_electron_integrals(basis):
    nb = len(basis)
    eri = np.zeros((nb, nb, nb, nb))
    done = set()
    for i, j, k, l in itertools.product(range(nb), repeat=4):
        if (i, j, k, l) in done:
            continue
        val = 0.0
        bi, bj, bk, bl = basis[i], basis[j], basis[k], basis[l]
        for a1, c1 in zip(bi.exps, bi.coefs):
            for a2, c2 in zip(bj.exps, bj.coefs):
                for a3, c3 in zip(bk.exps, bk.coefs):
                    for a4, c4 in zip(bl.exps, bl.coefs):
                        val += c1 * c2 * c3 * c4 * prim_eri(
                            a1, bi.lmn, bi.center, a2, bj.lmn, bj.center,
                            a3, bk.lmn, bk.center, a4, bl.lmn, bl.center)
        for perm in {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                     (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}:
            eri[perm] = val
            done.add(perm)
    return eri


def nuclear_repulsion(atoms):
    e = 0.0
    for (s1, c1), (s2, c2) in itertools.combinations(atoms, 2):
        e += CHARGES[s1] * CHARGES[s2] / np.linalg.norm(np.asarray(c1) - np.asarray(c2))
    return e


def rhf(S, h, eri, n_electrons, max_cycles=200, conv=1e-12):
    """Closed-shell RHF with DIIS.  Returns (E_total_electronic, C, eps)."""
    nocc = n_electrons // 2
    vals, vecs = np.linalg.eigh(S)
    X = vecs @ np.diag(vals ** -0.5) @ vecs.T
    F = h.copy()
    D = np.zeros_like(h)
    errs, focks = [], []
    e_old = 0.0
    for cycle in range(max_cycles):
        Fp = X.T @ F @ X
        eps, Cp = np.linalg.eigh(Fp)
        C = X @ Cp
        Cocc = C[:, :nocc]
        D = 2.0 * Cocc @ Cocc.T
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        F = h + J - 0.5 * K
        E = 0.5 * np.sum(D * (h + F))
        err = F @ D @ S - S @ D @ F
        errs.append(X.T @ err @ X)
        focks.append(F.copy())
        if len(errs) > 8:
            errs.pop(0)
            focks.pop(0)
        if cycle > 0 and abs(E - e_old) < conv and np.max(np.abs(err)) < 1e-9:
            return E, C, eps
        e_old = E
        if len(errs) >= 2:
            m = len(errs)
            B = -np.ones((m + 1, m + 1))
            B[m, m] = 0.0
            for a in range(m):
                for b in range(m):
                    B[a, b] = np.sum(errs[a] * errs[b])
            rhs = np.zeros(m + 1)
            rhs[m] = -1.0
            try:
                w = np.linalg.solve(B, rhs)[:m]
                F = sum(wi * fi for wi, fi in zip(w, focks))
            except np.linalg.LinAlgError:
                pass
    raise RuntimeError("SCF failed to converge")


def mo_integrals(C, h, eri):
    h_mo = C.T @ h @ C
    eri_mo = np.einsum("pqrs,pi->iqrs", eri, C)
    eri_mo = np.einsum("iqrs,qj->ijrs", eri_mo, C)
    eri_mo = np.einsum("ijrs,rk->ijks", eri_mo, C)
    eri_mo = np.einsum("ijks,sl->ijkl", eri_mo, C)
    return h_mo, eri_mo


def freeze_core(h_mo, eri_mo, core, active):
    """Fold frozen core orbitals into effective integrals and a constant."""
    h_eff = h_mo[np.ix_(active, active)].copy()
    for x, t in enumerate(active):
        for y, u in enumerate(active):
            for c in core:
                h_eff[x, y] += 2.0 * eri_mo[t, u, c, c] - eri_mo[t, c, c, u]
    e_core = 0.0
    for c in core:
        e_core += 2.0 * h_mo[c, c]
        for cp in core:
            e_core += 2.0 * eri_mo[c, c, cp, cp] - eri_mo[c, cp, cp, c]
    eri_act = eri_mo[np.ix_(active, active, active, active)]
    return h_eff, eri_act, e_core


def write_fcidump(path, h_mo, eri_mo, e_const, n_electrons, ms2=0, threshold=1e-14):
    norb = h_mo.shape[0]
    lines = [f"&FCI NORB={norb},NELEC={n_electrons},MS2={ms2},",
             " ORBSYM=" + ",".join(["1"] * norb) + ",",
             " ISYM=1,",
             "&END"]
    seen = set()
    for i in range(norb):
        for j in range(i + 1):
            for k in range(norb):
                for l in range(k + 1):
                    if (i, j) < (k, l) or (i, j, k, l) in seen:
                        continue
                    for perm in _fcidump_perms(i, j, k, l):
                        seen.add(perm)
                    val = eri_mo[i, j, k, l]
                    if abs(val) > threshold:
                        lines.append(f"{val:.17G} {i+1} {j+1} {k+1} {l+1}")
    for i in range(norb):
        for j in range(i + 1):
            val = h_mo[i, j]
            if abs(val) > threshold:
                lines.append(f"{val:.17G} {i+1} {j+1} 0 0")
    lines.append(f"{e_const:.17G} 0 0 0 0")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _fcidump_perms(i, j, k, l):
    return {(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
            (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)}


# --- local determinant FCI for validation (any size, slow) -----------------

def _spin_orbital_tensors(h_mo, eri_mo):
    norb = h_mo.shape[0]
    r = 2 * norb
    h = np.zeros((r, r))
    V = np.zeros((r, r, r, r))
    for p in range(r):
        for q in range(r):
            if p % 2 == q % 2:
                h[p, q] = h_mo[p // 2, q // 2]
    for p in range(r):
        for q in range(r):
            for u in range(r):
                if p % 2 != u % 2:
                    continue
                for v in range(r):
                    if q % 2 != v % 2:
                        continue
                    V[p, q, u, v] = 0.5 * eri_mo[p // 2, u // 2, q // 2, v // 2]
    return h, V


def _apply_string(x, factors):
    sign = 1
    for orbital, dagger in reversed(factors):
        bit = 1 << orbital
        if dagger == bool(x & bit):
            return None, 0
        if bin(x & (bit - 1)).count("1") % 2:
            sign = -sign
        x ^= bit
    return x, sign


def determinant_fci(h_mo, eri_mo, e_const, n_electrons):
    """Lowest eigenvalue over determinants with the given electron count."""
    h, V = _spin_orbital_tensors(h_mo, eri_mo)
    r = h.shape[0]
    dets = [x for x in range(1 << r) if bin(x).count("1") == n_electrons]
    index = {d: i for i, d in enumerate(dets)}
    dim = len(dets)
    H = np.zeros((dim, dim))
    ops = []
    for i in range(r):
        for j in range(r):
            if h[i, j] != 0.0:
                ops.append((h[i, j], ((i, True), (j, False))))
    for p in range(r):
        for q in range(r):
            for u in range(r):
                for v in range(r):
                    if V[p, q, u, v] != 0.0:
                        ops.append((V[p, q, u, v],
                                    ((p, True), (q, True), (v, False), (u, False))))
    for col, x in enumerate(dets):
        for coeff, factors in ops:
            y, sign = _apply_string(x, factors)
            if sign:
                H[index[y], col] += coeff * sign
    return float(np.linalg.eigvalsh(H)[0]) + e_const


# --- fixture definitions -----------------------------------------------------

H2_LENGTHS = [0.30, 0.50, 0.735, 0.90, 1.10, 1.30, 1.50, 1.75, 2.00, 2.20, 2.35, 2.50]
LIH_LENGTHS = [1.00, 1.20, 1.40, 1.5949, 1.80, 2.10, 2.40, 2.80, 3.20]
H4_LENGTHS = [0.70, 0.85, 1.00, 1.20, 1.50, 1.80]


def run_molecule(atoms, n_electrons):
    basis = build_basis(atoms)
    S, T, Vne = one_electron_integrals(basis, atoms)
    eri = two_electron_integrals(basis)
    h = T + Vne
    e_elec, C, eps = rhf(S, h, eri, n_electrons)
    e_nuc = nuclear_repulsion(atoms)
    h_mo, eri_mo = mo_integrals(C, h, eri)
    return {"S": S, "h": h, "eri": eri, "C": C, "eps": eps,
            "e_rhf": e_elec + e_nuc, "e_nuc": e_nuc,
            "h_mo": h_mo, "eri_mo": eri_mo, "basis": basis}


def sigma_orbitals(C, basis, axis=2):
    """MO indices with no weight on p functions perpendicular to the axis."""
    perp = [k for k, b in enumerate(basis)
            if sum(b.lmn) == 1 and b.lmn[axis] == 0]
    keep = []
    for mo in range(C.shape[1]):
        if not perp or np.max(np.abs(C[perp, mo])) < 1e-8:
            keep.append(mo)
    return keep


def h2_fixture(d_angstrom):
    z = d_angstrom * BOHR_PER_ANGSTROM
    atoms = [("H", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, z))]
    res = run_molecule(atoms, 2)
    return res["h_mo"], res["eri_mo"], res["e_nuc"], 2, res


def h4_fixture(d_angstrom):
    z = d_angstrom * BOHR_PER_ANGSTROM
    atoms = [("H", (0.0, 0.0, k * z)) for k in range(4)]
    res = run_molecule(atoms, 4)
    return res["h_mo"], res["eri_mo"], res["e_nuc"], 4, res


def lih_fixture(d_angstrom):
    """LiH in a (2e, 3o) active space: the three lowest sigma MOs above the core."""
    z = d_angstrom * BOHR_PER_ANGSTROM
    atoms = [("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, z))]
    res = run_molecule(atoms, 4)
    sigma = sigma_orbitals(res["C"], res["basis"])
    core = [sigma[0]]
    active = sigma[1:4]
    h_eff, eri_act, e_core = freeze_core(res["h_mo"], res["eri_mo"], core, active)
    return h_eff, eri_act, res["e_nuc"] + e_core, 2, res


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--check", action="store_true", help="run validation checks")
    ap.add_argument("--out", default="fixtures/fcidump")
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)

    summary = []
    for d in H2_LENGTHS:
        h_mo, eri_mo, const, nelec, res = h2_fixture(d)
        path = os.path.join(args.out, f"h2_{d:.4f}.fcidump")
        write_fcidump(path, h_mo, eri_mo, const, nelec)
        e_fci = determinant_fci(h_mo, eri_mo, const, nelec)
        summary.append((path, res["e_rhf"], e_fci))
        print(f"{path}: RHF={res['e_rhf']:.8f}  FCI={e_fci:.8f}")
    for d in H4_LENGTHS:
        h_mo, eri_mo, const, nelec, res = h4_fixture(d)
        path = os.path.join(args.out, f"h4_{d:.4f}.fcidump")
        write_fcidump(path, h_mo, eri_mo, const, nelec)
        e_fci = determinant_fci(h_mo, eri_mo, const, nelec)
        summary.append((path, res["e_rhf"], e_fci))
        print(f"{path}: RHF={res['e_rhf']:.8f}  FCI={e_fci:.8f}")
    for d in LIH_LENGTHS:
        h_eff, eri_act, const, nelec, res = lih_fixture(d)
        path = os.path.join(args.out, f"lih_{d:.4f}.fcidump")
        write_fcidump(path, h_eff, eri_act, const, nelec)
        e_cas = determinant_fci(h_eff, eri_act, const, nelec)
        summary.append((path, res["e_rhf"], e_cas))
        print(f"{path}: RHF={res['e_rhf']:.8f}  CASCI(2e,3o)={e_cas:.8f}")

    if args.check:
        print("\nvalidation:")
        atoms = [("H", (0.0, 0.0, 0.0))]
        basis = build_basis(atoms)
        S, T, Vne = one_electron_integrals(basis, atoms)
        e_h = (T + Vne)[0, 0]
        print(f"  H atom: {e_h:.8f}  (reference -0.46658185)")
        assert abs(e_h - (-0.46658185)) < 1e-6

        h_mo, eri_mo, const, nelec, _ = h2_fixture(0.735)
        e = determinant_fci(h_mo, eri_mo, const, nelec)
        print(f"  H2 @ 0.735 FCI: {e:.8f}  (reference -1.1373060)")
        assert abs(e - (-1.1373060)) < 2e-5

        h_mo, eri_mo, const, nelec, _ = h2_fixture(0.7414)
        e = determinant_fci(h_mo, eri_mo, const, nelec)
        print(f"  H2 @ 0.7414 FCI: {e:.8f}  (reference -1.1372838)")
        assert abs(e - (-1.1372838)) < 2e-5

        h_mo, eri_mo, const, nelec, _ = h2_fixture(2.50)
        e = determinant_fci(h_mo, eri_mo, const, nelec)
        print(f"  H2 @ 2.50 FCI: {e:.8f}  (dissociation limit -0.93316370)")
        # still weakly bound at 2.5 A: a few mHa below the 2*E(H) limit
        assert 2 * (-0.46658185) - 0.01 < e < 2 * (-0.46658185)

        z = 1.5949 * BOHR_PER_ANGSTROM
        res = run_molecule([("Li", (0.0, 0.0, 0.0)), ("H", (0.0, 0.0, z))], 4)
        e_full = determinant_fci(res["h_mo"], res["eri_mo"], res["e_nuc"], 4)
        print(f"  LiH @ 1.5949 full FCI: {e_full:.8f}  (reference about -7.8823)")
        assert abs(e_full - (-7.8823)) < 2e-3
        print("validation passed")


if __name__ == "__main__":
    main()

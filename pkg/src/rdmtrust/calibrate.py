"""Trust-radius calibration via nearest-Clifford reference circuits.

The reference circuit is the cliffordized ansatz (same depth, same qubit
connectivity); delta_ref is the Frobenius distance between its noiseless and
noisy 2-RDMs, and the trust radius is k * delta_ref.  The two appendix
bounds are evaluated from the same 2-RDM element set and norm as the rest of
the package.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .circuits import CLIFFORD_1Q, Circuit, cliffordize, nearest_clifford, process_fidelity
from .rdm import frobenius_distance, measure_rdms
from .simulator import NoiseModel, QuantumState, simulate


@dataclass
class CalibrationReport:
    delta_ref: float
    k: float
    delta: float
    substitutions: list[tuple[str, str, float]] = field(default_factory=list)
    theorem1_bound: float = 0.0
    theorem2_delta: float | None = None

    def as_dict(self) -> dict:
        return {
            "delta_ref": self.delta_ref,
            "k": self.k,
            "delta": self.delta,
            "theorem1_bound": self.theorem1_bound,
            "theorem2_delta": self.theorem2_delta,
            "substitutions": [list(s) for s in self.substitutions],
        }

    def save_json(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def save_substitutions_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["original", "clifford", "fidelity"])
            for orig, cliff, fid in self.substitutions:
                writer.writerow([orig, cliff, f"{fid:.12g}"])


def substitution_table(circuit: Circuit) -> list[tuple[str, str, float]]:
    """Per-gate record of nearest-Clifford replacements (non-Clifford 1q gates)."""
    rows = []
    for g in circuit.gates:
        if g.arity != 1 or g.kind in CLIFFORD_1Q:
            continue
        chosen = nearest_clifford(g)
        fid = process_fidelity(g.matrix(), chosen.matrix())
        angle = f"({g.angle:.6g})" if g.angle is not None else ""
        rows.append((f"{g.kind}{angle}@q{g.qubits[0]}", chosen.kind, fid))
    return rows


def delta_ref(circuit: Circuit, noise: NoiseModel, r: int,
              shots: int | None = None, seed: int | None = None) -> float:
    """Frobenius distance between noiseless and noisy 2-RDMs of the
    cliffordized reference circuit."""
    reference = cliffordize(circuit)
    ideal = simulate(reference)
    noisy = simulate(reference, noise)
    _, d2_ideal = measure_rdms(ideal, r, shots=shots, seed=seed)
    _, d2_noisy = measure_rdms(noisy, r, shots=shots,
                               seed=None if seed is None else seed + 1)
    return frobenius_distance(d2_ideal, d2_noisy)


def trust_radius(delta_ref_value: float, k: float) -> float:
    if k <= 0:
        raise ValueError("scaling factor k must be positive")
    return k * delta_ref_value


def theorem1_bound(n: int, p_singles, p_twos) -> float:
    """Local-noise bound: 2 n^2 (sum of single-qubit p + sum of two-qubit p)."""
    ps = list(p_singles)
    pt = list(p_twos)
    for p in ps + pt:
        if not 0.0 <= p <= 1.0:
            raise ValueError("probabilities must lie in [0, 1]")
    return 2.0 * n * n * (sum(ps) + sum(pt))


def theorem1_bound_for(circuit: Circuit, noise: NoiseModel) -> float:
    n1, n2 = circuit.gate_census()
    return theorem1_bound(circuit.n, [noise.p1] * n1, [noise.p2] * n2)


def theorem2_delta(circuit: Circuit, p1: float, p2: float,
                   initial: QuantumState | None = None) -> float:
    """Exact RDM deviation under the per-layer global depolarizing channel.

    Evaluates ``[1 - (1-p1)^d1 (1-p2)^d2] * ||D2(rho) - D2(I/2^n)||_F`` with
    rho the noiseless output state; equal (not just an upper bound) to the
    simulated per-layer-global deviation.
    """
    d1_layers, d2_layers = circuit.layer_counts()
    factor = 1.0 - (1.0 - p1) ** d1_layers * (1.0 - p2) ** d2_layers
    state = simulate(circuit, initial=initial)
    _, d2_ideal = measure_rdms(state, circuit.n)
    dim = 1 << circuit.n
    mixed = np.eye(dim, dtype=complex) / dim
    _, d2_mixed = measure_rdms(mixed, circuit.n)
    return factor * frobenius_distance(d2_ideal, d2_mixed)


def measured_delta(circuit: Circuit, noise: NoiseModel, r: int,
                   initial: QuantumState | None = None) -> float:
    """Simulated ||D2(ideal) - D2(noisy)||_F for the circuit itself."""
    ideal = simulate(circuit, initial=initial)
    noisy = simulate(circuit, noise, initial=initial)
    _, d2_ideal = measure_rdms(ideal, r)
    _, d2_noisy = measure_rdms(noisy, r)
    return frobenius_distance(d2_ideal, d2_noisy)


def calibrate(circuit: Circuit, noise: NoiseModel, r: int, k: float = 2.0,
              shots: int | None = None, seed: int | None = None,
              with_theorem2: bool = True) -> CalibrationReport:
    """Full calibration: delta_ref, trust radius, substitutions, theorem bounds."""
    dref = delta_ref(circuit, noise, r, shots=shots, seed=seed)
    report = CalibrationReport(
        delta_ref=dref,
        k=k,
        delta=trust_radius(dref, k),
        substitutions=substitution_table(circuit),
        theorem1_bound=theorem1_bound_for(circuit, noise),
        theorem2_delta=theorem2_delta(circuit, noise.p1, noise.p2) if with_theorem2 else None,
    )
    return report

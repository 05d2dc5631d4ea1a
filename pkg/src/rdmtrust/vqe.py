"""Variational optimization of ansatz parameters against the qubit Hamiltonian.

Noiseless energies are evaluated on a fused fast path: every parameterized
block is an exponential ``exp(i a P)`` of a single Pauli string, applied as
``cos(a) psi + i sin(a) P psi``, which is exactly what the compiled circuit
implements up to global phase.  Noisy energies always go through the compiled
circuit and the density-matrix simulator, so per-gate noise acts on the same
elementary gates that hardware would run.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .circuits import (Circuit, Gate, build_hea, build_uccsd, excitation_strings,
                       hea_parameter_count, uccsd_excitations)
from .fermops import _string_action, _parity_table
from .hamiltonian import MolecularSystem, build_qubit_hamiltonian
from .simulator import NoiseModel, simulate


@dataclass
class VqeConfig:
    ansatz: str = "uccsd"              # "uccsd" or "hea"
    hea_layers: int = 1
    optimizer: str = "auto"            # auto | parameter-shift | nelder-mead
    max_iters: int = 200
    energy_tol: float = 1e-8
    seed: int = 0
    noise: NoiseModel | None = None

    def __post_init__(self):
        if self.ansatz not in ("uccsd", "hea"):
            raise ValueError(f"unknown ansatz {self.ansatz!r}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if self.energy_tol <= 0:
            raise ValueError("energy_tol must be positive")

    def resolved_optimizer(self) -> str:
        if self.optimizer != "auto":
            return self.optimizer
        return "nelder-mead" if self.noise is not None else "parameter-shift"


@dataclass
class VqeResult:
    params: np.ndarray
    energy: float
    trace: list[float]
    converged: bool
    wall_time_s: float = 0.0

    def record(self, cfg: VqeConfig | None = None) -> dict:
        out = {
            "energy": self.energy,
            "params": [float(p) for p in self.params],
            "trace": [float(e) for e in self.trace],
            "converged": self.converged,
        }
        if cfg is not None:
            out["config"] = {
                "ansatz": cfg.ansatz, "hea_layers": cfg.hea_layers,
                "optimizer": cfg.resolved_optimizer(), "max_iters": cfg.max_iters,
                "energy_tol": cfg.energy_tol, "seed": cfg.seed,
                "noise": None if cfg.noise is None else
                    {"p1": cfg.noise.p1, "p2": cfg.noise.p2, "mode": cfg.noise.mode},
            }
        return out


def _apply_pauli(vec: np.ndarray, letters: str) -> np.ndarray:
    flip, phase_mask, ny = _string_action(letters)
    n = len(letters)
    idx = np.arange(vec.shape[0])
    signs = 1.0 - 2.0 * _parity_table(n)[idx & phase_mask].astype(np.float64)
    out = np.empty_like(vec)
    out[idx ^ flip] = (1j ** ny) * signs * vec
    return out


class AnsatzEvaluator:
    """Shared machinery for energies, gradients, and circuit compilation."""

    def __init__(self, sys: MolecularSystem, ansatz: str, hea_layers: int = 1,
                 noise: NoiseModel | None = None):
        self.sys = sys
        self.ansatz = ansatz
        self.hea_layers = hea_layers
        self.noise = noise
        self.n = sys.r
        self.h_dense = build_qubit_hamiltonian(sys).to_matrix()
        # plan: ordered ("gate", Gate) and ("pexp", letters, slope, param_index)
        plan: list[tuple] = []
        if ansatz == "uccsd":
            for q in range(sys.n_electrons):
                plan.append(("gate", Gate("X", (q,))))
            for k, exc in enumerate(uccsd_excitations(sys.r, sys.n_electrons)):
                for letters, beta in excitation_strings(exc, sys.r):
                    plan.append(("pexp", letters, beta, k))
            self.n_params = len(uccsd_excitations(sys.r, sys.n_electrons))
        else:
            k = 0
            for wall in range(hea_layers + 1):
                for kind in ("RY", "RZ"):
                    for q in range(self.n):
                        letters = "".join("I" if t != q else kind[1] for t in range(self.n))
                        plan.append(("pexp", letters, -0.5, k))
                        k += 1
                if wall < hea_layers:
                    for q in range(self.n - 1):
                        plan.append(("gate", Gate("CX", (q, q + 1))))
            self.n_params = k
        self.plan = plan
        self.occurrences: list[list[int]] = [[] for _ in range(self.n_params)]
        for pos, op in enumerate(plan):
            if op[0] == "pexp":
                self.occurrences[op[3]].append(pos)

    def initial_params(self, seed: int) -> np.ndarray:
        if self.ansatz == "uccsd":
            return np.zeros(self.n_params)
        rng = np.random.default_rng(seed)
        return rng.uniform(-0.1, 0.1, self.n_params)

    def check_params(self, params: np.ndarray) -> np.ndarray:
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {params.shape}")
        return params

    def statevector(self, params: np.ndarray, override: dict[int, float] | None = None) -> np.ndarray:
        psi = np.zeros(1 << self.n, dtype=complex)
        psi[0] = 1.0
        for pos, op in enumerate(self.plan):
            if op[0] == "gate":
                from .simulator import _apply_gate_vector
                psi = _apply_gate_vector(psi, op[1], self.n)
            else:
                _, letters, slope, k = op
                a = slope * params[k]
                if override is not None and pos in override:
                    a = override[pos]
                psi = np.cos(a) * psi + 1j * np.sin(a) * _apply_pauli(psi, letters)
        return psi

    def circuit(self, params: np.ndarray) -> Circuit:
        params = self.check_params(params)
        if self.ansatz == "uccsd":
            return build_uccsd(self.sys, params)
        return build_hea(self.n, self.hea_layers, params)

    def energy(self, params: np.ndarray, override: dict[int, float] | None = None) -> float:
        if self.noise is None:
            psi = self.statevector(params, override)
            return float(np.real(np.vdot(psi, self.h_dense @ psi)))
        if override is not None:
            raise ValueError("per-occurrence overrides are a noiseless-path feature")
        rho = simulate(self.circuit(params), self.noise).data
        return float(np.real(np.einsum("ij,ji->", rho, self.h_dense)))

    def gradient_component(self, params: np.ndarray, index: int) -> float:
        """Exact parameter-shift derivative, summed over string occurrences.

        Each occurrence enters as ``exp(i a P)`` with ``a = slope * theta``,
        so dE/dtheta = sum_m slope_m * [E(a_m + pi/4) - E(a_m - pi/4)].
        """
        params = self.check_params(params)
        if not 0 <= index < self.n_params:
            raise IndexError(f"parameter index {index} out of range")
        total = 0.0
        for pos in self.occurrences[index]:
            _, letters, slope, k = self.plan[pos]
            a = slope * params[k]
            e_plus = self.energy(params, {pos: a + np.pi / 4})
            e_minus = self.energy(params, {pos: a - np.pi / 4})
            total += slope * (e_plus - e_minus)
        return total

    def gradient(self, params: np.ndarray) -> np.ndarray:
        return np.array([self.gradient_component(params, i) for i in range(self.n_params)])


def parameter_shift_gradient(sys: MolecularSystem, ansatz: str, params,
                             index: int, hea_layers: int = 1) -> float:
    """Analytic gradient of the noiseless energy w.r.t. one parameter."""
    ev = AnsatzEvaluator(sys, ansatz, hea_layers=hea_layers)
    return ev.gradient_component(ev.check_params(params), index)


def run_vqe(sys: MolecularSystem, cfg: VqeConfig) -> VqeResult:
    """Minimize the configured ansatz energy; deterministic under a fixed seed."""
    t0 = time.perf_counter()
    ev = AnsatzEvaluator(sys, cfg.ansatz, hea_layers=cfg.hea_layers, noise=cfg.noise)
    params = ev.initial_params(cfg.seed)
    optimizer = cfg.resolved_optimizer()
    if cfg.max_iters == 0:
        e0 = ev.energy(params)
        return VqeResult(params, e0, [e0], False, time.perf_counter() - t0)
    if optimizer == "parameter-shift":
        result = _gradient_descent(ev, params, cfg)
    elif optimizer == "nelder-mead":
        result = _nelder_mead(ev, params, cfg)
    else:
        raise ValueError(f"unknown optimizer {optimizer!r}")
    result.wall_time_s = time.perf_counter() - t0
    return result


def _gradient_descent(ev: AnsatzEvaluator, params: np.ndarray, cfg: VqeConfig) -> VqeResult:
    energy = ev.energy(params)
    trace = [energy]
    step = 1.0
    flat_steps = 0
    converged = False
    for _ in range(cfg.max_iters):
        grad = ev.gradient(params)
        gnorm2 = float(np.dot(grad, grad))
        if gnorm2 == 0.0:
            converged = True
            break
        accepted = False
        step = min(step * 2.0, 4.0)
        while step > 1e-12:
            trial = params - step * grad
            e_trial = ev.energy(trial)
            if e_trial <= energy - 1e-4 * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            converged = True
            break
        delta = energy - e_trial
        params, energy = trial, e_trial
        trace.append(energy)
        flat_steps = flat_steps + 1 if delta < cfg.energy_tol else 0
        if flat_steps >= 3:
            converged = True
            break
    return VqeResult(params, energy, trace, converged)


def _nelder_mead(ev: AnsatzEvaluator, params: np.ndarray, cfg: VqeConfig) -> VqeResult:
    trace: list[float] = []

    def objective(x):
        e = ev.energy(np.asarray(x))
        trace.append(min(e, trace[-1]) if trace else e)
        return e

    res = minimize(objective, params, method="Nelder-Mead",
                   options={"maxiter": cfg.max_iters, "fatol": cfg.energy_tol,
                            "xatol": 1e-8, "adaptive": True})
    return VqeResult(np.asarray(res.x), float(res.fun), trace, bool(res.success))

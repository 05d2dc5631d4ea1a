"""Trust-region-constrained semidefinite purification of noisy 2-RDMs.

Solves, by consensus operator splitting (ADMM):

    minimize   sum(K * D) + H_n
    subject to D Hermitian, pair-antisymmetric, Tr D = N(N-1),
               D >= 0,  Q(D) >= 0,  G(D) >= 0,
               ||D - D_noisy||_F <= delta.

The variable lives in the pair-antisymmetric subspace, parameterized by the
m x m symmetric matrix D~ with m = r(r-1)/2; the one-electron RDM is defined
from D by the contraction identity throughout.  Each iteration solves a
prefactorized least-squares for the consensus variable (which enforces the
affine constraints exactly), projects lifted copies onto the three PSD cones
and the Frobenius ball, and updates scaled duals.  The affine maps D -> Q(D)
and D -> G(D) are materialized once per problem from the anticommutation
expansion in :mod:`rdmtrust.rdm`; the solver never re-derives them.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .hamiltonian import ReducedHamiltonian, antisymmetric_projector, pair_swap, reduced_energy
from .rdm import Rdm1, Rdm2, build_g, build_q, check_nrep, contract_to_rdm1, _as_matrix

log = logging.getLogger(__name__)


@dataclass
class SdpOptions:
    max_iters: int = 50000
    residual_tol: float = 1e-6
    penalty: float = 1.0
    over_relaxation: float = 1.6
    adapt_every: int = 100
    history_every: int = 50
    stall_iters: int = 500
    stall_rel: float = 1e-10


@dataclass
class SdpProblem:
    """Purification problem: reduced Hamiltonian, noisy target, trust radius."""

    k: ReducedHamiltonian
    d_noisy: np.ndarray
    n_electrons: int
    delta: float = np.inf
    options: SdpOptions = field(default_factory=SdpOptions)

    def __post_init__(self):
        if not (self.delta >= 0):
            raise ValueError("delta must be nonnegative (inf allowed)")
        if self.n_electrons < 2:
            raise ValueError("need at least 2 electrons")


@dataclass
class SdpResult:
    d_corrected: Rdm2
    d1_corrected: Rdm1
    energy: float
    status: str                      # optimal | max_iters | infeasible
    residual_history: list[tuple[int, float, float]]
    distance_to_noisy: float
    iterations: int
    delta: float
    warm: dict | None = None         # internal state for warm-started re-solves


def project_psd(m: np.ndarray) -> np.ndarray:
    """Nearest positive-semidefinite matrix in Frobenius norm."""
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > 1e-8 * scale:
        raise ValueError("project_psd requires a Hermitian matrix")
    sym = 0.5 * (m + m.conj().T)
    vals, vecs = np.linalg.eigh(sym)
    vals = np.maximum(vals, 0.0)
    return (vecs * vals) @ vecs.conj().T


def project_ball(d, center, delta: float):
    """Project onto the Frobenius ball of radius ``delta`` around ``center``."""
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    dm = _as_matrix(d)
    cm = _as_matrix(center)
    diff = dm - cm
    dist = float(np.linalg.norm(diff))
    if dist <= delta:
        return dm.copy()
    if dist == 0.0:
        return cm.copy()
    return cm + diff * (delta / dist)


def project_affine(d, n_electrons: int) -> np.ndarray:
    """Orthogonal projection onto the Hermitian, pair-antisymmetric,
    trace-N(N-1) affine subspace."""
    m = _as_matrix(d)
    r = int(round(np.sqrt(m.shape[0])))
    pa = antisymmetric_projector(r)
    out = 0.5 * (m + m.conj().T)
    out = pa @ out @ pa
    target = n_electrons * (n_electrons - 1)
    n_slots = r * (r - 1) // 2
    out = out + (target - np.real(np.trace(out))) / n_slots * pa
    return out


# --- pair-antisymmetric coordinates ------------------------------------------

def pair_basis(r: int) -> np.ndarray:
    """Isometric embedding B of antisymmetric pairs into composite indices."""
    m = r * (r - 1) // 2
    b = np.zeros((r * r, m))
    col = 0
    for p in range(r):
        for q in range(p + 1, r):
            b[p * r + q, col] = 1.0 / np.sqrt(2.0)
            b[q * r + p, col] = -1.0 / np.sqrt(2.0)
            col += 1
    return b


class _SymVec:
    """Isometric vectorization of real symmetric matrices."""

    def __init__(self, m: int):
        self.m = m
        self.rows, self.cols = np.triu_indices(m)
        self.w = np.where(self.rows == self.cols, 1.0, np.sqrt(2.0))

    @property
    def dim(self) -> int:
        return len(self.w)

    def vec(self, a: np.ndarray) -> np.ndarray:
        return a[self.rows, self.cols] * self.w

    def mat(self, v: np.ndarray) -> np.ndarray:
        a = np.zeros((self.m, self.m))
        vals = v / self.w
        a[self.rows, self.cols] = vals
        a[self.cols, self.rows] = vals
        return a


class _Maps:
    """Materialized reduced-space linear operators for one problem size."""

    def __init__(self, r: int, n_electrons: int):
        self.r = r
        self.n = n_electrons
        self.m = r * (r - 1) // 2
        self.basis = pair_basis(r)
        self.sv_m = _SymVec(self.m)
        self.sv_f = _SymVec(r * r)
        zeros2 = np.zeros((r * r, r * r))
        zeros1 = np.zeros((r, r))
        self.q_const = build_q(zeros2, zeros1, r)
        dim = self.sv_m.dim
        self.lam_q = np.zeros((dim, dim))
        self.lam_g = np.zeros((self.sv_f.dim, dim))
        for k in range(dim):
            e = np.zeros(dim)
            e[k] = 1.0
            d_full = self.basis @ self.sv_m.mat(e) @ self.basis.T
            d1 = contract_to_rdm1(d_full, n_electrons).d.real
            q_full = build_q(d_full, d1, r) - self.q_const
            g_full = build_g(d_full, d1, r)
            self.lam_q[:, k] = self.sv_m.vec(self.basis.T @ q_full.real @ self.basis)
            self.lam_g[:, k] = self.sv_f.vec(g_full.real)
        self.q_const_red = self.sv_m.vec(self.basis.T @ self.q_const @ self.basis)
        self.trace_vec = self.sv_m.vec(np.eye(self.m))

    def embed(self, theta: np.ndarray) -> np.ndarray:
        return self.basis @ self.sv_m.mat(theta) @ self.basis.T

    def reduce(self, d_full: np.ndarray) -> np.ndarray:
        return self.sv_m.vec(self.basis.T @ d_full @ self.basis)


_MAPS_CACHE: dict[tuple[int, int], _Maps] = {}


def _get_maps(r: int, n: int) -> _Maps:
    key = (r, n)
    if key not in _MAPS_CACHE:
        _MAPS_CACHE[key] = _Maps(r, n)
    return _MAPS_CACHE[key]


def _psd_project_vec(sv: _SymVec, v: np.ndarray) -> np.ndarray:
    a = sv.mat(v)
    vals, vecs = np.linalg.eigh(a)
    if vals[0] >= 0.0:
        return v.copy()
    vals = np.maximum(vals, 0.0)
    return sv.vec((vecs * vals) @ vecs.T)


def purify(problem: SdpProblem, warm: dict | None = None) -> SdpResult:
    """Solve the trust-region purification SDP.

    Infeasibility (a trust radius too small to reach any N-representable
    RDM) is reported through ``status``, never raised.
    """
    opt = problem.options
    r = problem.k.r
    n = problem.n_electrons
    maps = _get_maps(r, n)
    sv_m, sv_f = maps.sv_m, maps.sv_f

    d_noisy = _as_matrix(problem.d_noisy)
    if d_noisy.shape != (r * r, r * r):
        raise ValueError("noisy RDM dimension mismatch")
    d_sym = 0.5 * (d_noisy + d_noisy.conj().T)
    imag_norm = float(np.linalg.norm(np.imag(d_sym)))
    if imag_norm > 1e-8:
        log.warning("dropping imaginary part of noisy RDM (norm %.3e)", imag_norm)
    d_sym = np.real(d_sym)

    kmat = problem.k.matrix
    if np.iscomplexobj(kmat):
        if np.max(np.abs(kmat.imag)) > 1e-8:
            log.warning("dropping imaginary part of reduced Hamiltonian")
        kmat = kmat.real
    k_red = sv_m.vec(maps.basis.T @ kmat @ maps.basis)

    target_trace = float(n * (n - 1))
    t = maps.trace_vec
    m_pairs = float(maps.m)

    center = maps.reduce(d_sym)
    off_block2 = float(np.linalg.norm(d_sym - maps.embed(center))) ** 2
    finite = np.isfinite(problem.delta)
    history: list[tuple[int, float, float]] = []

    if finite:
        # distance from the noisy RDM to the affine subspace alone already
        # certifies infeasibility when it exceeds delta
        trace_gap2 = (np.dot(t, center) - target_trace) ** 2 / m_pairs
        affine_dist = float(np.sqrt(off_block2 + trace_gap2))
        if affine_dist > problem.delta * (1.0 + 1e-9) + 1e-15:
            log.info("infeasible by affine-distance certificate: %.3e > delta=%.3e",
                     affine_dist, problem.delta)
            return _result_from_theta(problem, maps, _project_trace(center, t, target_trace, m_pairs),
                                      d_sym, "infeasible", history, 0, warm=None)
        delta_eff2 = problem.delta ** 2 - off_block2
        delta_eff = float(np.sqrt(max(delta_eff2, 0.0)))
    else:
        delta_eff = np.inf

    if problem.delta == 0.0:
        theta = _clamp_ball_trace(center, center, delta_eff, t, target_trace, m_pairs)
        res = _result_from_theta(problem, maps, theta, d_sym, "optimal", history, 0, warm=None)
        rep = check_nrep(res.d1_corrected, res.d_corrected, n, tol=10 * opt.residual_tol)
        if not rep.passed:
            res.status = "infeasible"
        return res

    # consensus sets: D-cone, Q-cone, G-cone, and (finite delta) the ball
    use_ball = finite
    n_eye = 2.0 if use_ball else 1.0
    normal = n_eye * np.eye(sv_m.dim) + maps.lam_q.T @ maps.lam_q + maps.lam_g.T @ maps.lam_g
    chol = cho_factor(normal)
    minv_t = cho_solve(chol, t)
    denom = float(np.dot(t, minv_t))

    if warm is not None and warm.get("dim") == sv_m.dim and warm.get("use_ball") == use_ball:
        theta = warm["theta"].copy()
        ys = {k_: v.copy() for k_, v in warm["ys"].items()}
        us = {k_: v.copy() for k_, v in warm["us"].items()}
        rho = warm["rho"]
    else:
        theta = _project_trace(center, t, target_trace, m_pairs)
        ys = {"d": _psd_project_vec(sv_m, theta),
              "q": _psd_project_vec(sv_m, maps.lam_q @ theta + maps.q_const_red),
              "g": _psd_project_vec(sv_f, maps.lam_g @ theta)}
        us = {k_: np.zeros_like(v) for k_, v in ys.items()}
        if use_ball:
            ys["b"] = theta.copy()
            us["b"] = np.zeros_like(theta)
        rho = opt.penalty

    alpha = opt.over_relaxation
    status = "max_iters"
    best_rp = np.inf
    stall = 0
    window_rp = None
    it = 0
    for it in range(1, opt.max_iters + 1):
        rhs = (ys["d"] - us["d"]) \
            + maps.lam_q.T @ (ys["q"] - us["q"] - maps.q_const_red) \
            + maps.lam_g.T @ (ys["g"] - us["g"]) \
            - k_red / rho
        if use_ball:
            rhs = rhs + (ys["b"] - us["b"])
        theta = cho_solve(chol, rhs)
        nu = (np.dot(t, theta) - target_trace) / denom
        theta = theta - nu * minv_t

        vs = {"d": theta, "q": maps.lam_q @ theta + maps.q_const_red, "g": maps.lam_g @ theta}
        if use_ball:
            vs["b"] = theta
        rp2 = 0.0
        ds = np.zeros(sv_m.dim)
        for key_, v in vs.items():
            v_rel = alpha * v + (1.0 - alpha) * ys[key_]
            arg = v_rel + us[key_]
            if key_ == "b":
                y_new = _ball_project_vec(arg, center, delta_eff)
            elif key_ == "g":
                y_new = _psd_project_vec(sv_f, arg)
            else:
                y_new = _psd_project_vec(sv_m, arg)
            us[key_] = arg - y_new
            dy = y_new - ys[key_]
            if key_ == "q":
                ds += maps.lam_q.T @ dy
            elif key_ == "g":
                ds += maps.lam_g.T @ dy
            else:
                ds += dy
            ys[key_] = y_new
            rp2 += float(np.dot(v - y_new, v - y_new))
        rp = float(np.sqrt(rp2))
        rd = rho * float(np.linalg.norm(ds))

        if it % opt.history_every == 0 or it == 1:
            history.append((it, rp, rd))

        scale = max(1.0, float(np.linalg.norm(theta)))
        if rp <= opt.residual_tol * scale and rd <= opt.residual_tol * scale:
            status = "optimal"
            break

        if rp < best_rp * (1.0 - opt.stall_rel):
            best_rp = rp
            stall = 0
        else:
            stall += 1
            # only a finite trust ball can render the problem infeasible
            if use_ball and stall >= opt.stall_iters and rp > 100.0 * opt.residual_tol * scale:
                status = "infeasible"
                break

        # slow-tail acceptance: progress under 1% per window while the
        # iterate already satisfies the 10x-tolerance result contract
        if it % opt.stall_iters == 0:
            if (window_rp is not None and rp > window_rp * 0.99
                    and rp <= 10.0 * opt.residual_tol * scale
                    and rd <= 10.0 * opt.residual_tol * scale):
                status = "optimal"
                break
            window_rp = rp

        if opt.adapt_every and it % opt.adapt_every == 0:
            if rp > 10.0 * rd and rho < 1e4:
                rho *= 2.0
                for key_ in us:
                    us[key_] *= 0.5
            elif rd > 10.0 * rp and rho > 1e-4:
                rho *= 0.5
                for key_ in us:
                    us[key_] *= 2.0

    if use_ball and status == "infeasible":
        # a residual plateau is only circumstantial: if the clamped iterate
        # already satisfies the cones loosely, the problem was merely slow
        probe = _clamp_ball_trace(theta, center, delta_eff, t, target_trace, m_pairs)
        d_probe = maps.embed(probe)
        rep = check_nrep(contract_to_rdm1(d_probe, n), d_probe, n,
                         tol=100.0 * opt.residual_tol)
        if rep.passed:
            status = "max_iters"
            theta = probe
    if use_ball and status != "infeasible":
        theta = _clamp_ball_trace(theta, center, delta_eff, t, target_trace, m_pairs)
    history.append((it, rp if it else 0.0, rd if it else 0.0))

    warm_state = {"dim": sv_m.dim, "use_ball": use_ball, "theta": theta.copy(),
                  "ys": {k_: v.copy() for k_, v in ys.items()},
                  "us": {k_: v.copy() for k_, v in us.items()}, "rho": rho}
    res = _result_from_theta(problem, maps, theta, d_sym, status, history, it, warm=warm_state)
    if status == "optimal":
        rep = check_nrep(res.d1_corrected, res.d_corrected, n, tol=10 * opt.residual_tol)
        in_ball = (not finite) or res.distance_to_noisy <= problem.delta * (1.0 + 1e-6)
        if not (rep.passed and in_ball):
            res.status = "max_iters"
    return res


def _project_trace(v, t, target, m_pairs):
    return v + (target - np.dot(t, v)) / m_pairs * t


def _ball_project_vec(v, center, delta_eff):
    diff = v - center
    dist = float(np.linalg.norm(diff))
    if dist <= delta_eff or dist == 0.0:
        return v.copy()
    return center + diff * (delta_eff / dist)


def _clamp_ball_trace(theta, center, delta_eff, t, target, m_pairs):
    """Exact projection onto {trace plane} intersected with the ball."""
    c_plane = _project_trace(center, t, target, m_pairs)
    gap2 = float(np.dot(center - c_plane, center - c_plane))
    radius2 = delta_eff ** 2 - gap2
    if radius2 <= 0.0:
        return c_plane
    theta = _project_trace(theta, t, target, m_pairs)
    diff = theta - c_plane
    dist = float(np.linalg.norm(diff))
    radius = float(np.sqrt(radius2))
    if dist <= radius or dist == 0.0:
        return theta
    return c_plane + diff * (radius / dist)


def _result_from_theta(problem, maps, theta, d_sym, status, history, iterations,
                       warm) -> SdpResult:
    d_full = maps.embed(theta)
    d1 = contract_to_rdm1(d_full, problem.n_electrons)
    energy = reduced_energy(problem.k, d_full)
    dist = float(np.linalg.norm(d_full - d_sym))
    return SdpResult(
        d_corrected=Rdm2(d_full),
        d1_corrected=Rdm1(d1.d),
        energy=energy,
        status=status,
        residual_history=history,
        distance_to_noisy=dist,
        iterations=iterations,
        delta=problem.delta,
        warm=warm,
    )


def v2rdm_ground(k: ReducedHamiltonian, n_electrons: int, r: int | None = None,
                 options: SdpOptions | None = None) -> SdpResult:
    """Unconstrained v2RDM ground-state energy: purify with delta = inf."""
    r = k.r if r is None else r
    problem = SdpProblem(
        k=k,
        d_noisy=np.zeros((r * r, r * r)),
        n_electrons=n_electrons,
        delta=np.inf,
        options=options or SdpOptions(),
    )
    return purify(problem)

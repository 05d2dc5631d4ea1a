"""Gate-level circuits, ansatz builders, and nearest-Clifford substitution."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .fermops import FermionTerm, PauliSum, jordan_wigner_sum

SINGLE_QUBIT_KINDS = {"H", "X", "Y", "Z", "S", "SDG", "RX", "RY", "RZ"}
TWO_QUBIT_KINDS = {"CX", "CZ", "RZZ"}
ROTATION_KINDS = {"RX", "RY", "RZ", "RZZ"}
CLIFFORD_1Q = {"H", "X", "Y", "Z", "S", "SDG"}


class CliffordizeError(ValueError):
    """Raised when a circuit contains non-Clifford two-qubit gates."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if kind not in SINGLE_QUBIT_KINDS | TWO_QUBIT_KINDS:
            raise ValueError(f"unknown gate kind {kind!r}")
        arity = 2 if kind in TWO_QUBIT_KINDS else 1
        if len(self.qubits) != arity or len(set(self.qubits)) != arity:
            raise ValueError(f"{kind} expects {arity} distinct qubits, got {self.qubits}")
        if kind in ROTATION_KINDS:
            if self.angle is None:
                raise ValueError(f"{kind} requires an angle")
        elif self.angle is not None:
            raise ValueError(f"angle given for non-rotation gate {kind}")

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def matrix(self) -> np.ndarray:
        """Unitary in the |q0 q1> ordering of self.qubits (q0 most significant)."""
        return _gate_matrix(self.kind, self.angle)


def _gate_matrix(kind: str, angle: float | None) -> np.ndarray:
    s2 = 1.0 / np.sqrt(2.0)
    if kind == "H":
        return np.array([[s2, s2], [s2, -s2]], dtype=complex)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Y":
        return np.array([[0, -1j], [1j, 0]], dtype=complex)
    if kind == "Z":
        return np.diag([1.0, -1.0]).astype(complex)
    if kind == "S":
        return np.diag([1.0, 1j])
    if kind == "SDG":
        return np.diag([1.0, -1j])
    half = 0.5 * (angle or 0.0)
    c, s = np.cos(half), np.sin(half)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-1j * half), np.exp(1j * half)])
    if kind == "CX":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if kind == "CZ":
        return np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    if kind == "RZZ":
        return np.diag([np.exp(-1j * half), np.exp(1j * half),
                        np.exp(1j * half), np.exp(-1j * half)])
    raise ValueError(kind)


@dataclass
class Layer:
    tag: str                 # "1q" or "2q"
    gates: list[Gate]


class Circuit:
    """Ordered gate list on ``n`` qubits with an arity-tagged layer partition.

    Layers are built greedily: a gate joins the current layer unless it
    overlaps a qubit already used there or has a different arity class.
    """

    def __init__(self, n: int, gates: list[Gate] | None = None):
        if n < 1:
            raise ValueError("need at least one qubit")
        self.n = n
        self.gates: list[Gate] = []
        self._layers: list[Layer] | None = None
        for g in gates or []:
            self.append(g)

    def append(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.n:
            raise ValueError(f"gate {gate.kind} on {gate.qubits} exceeds {self.n} qubits")
        self.gates.append(gate)
        self._layers = None

    def extend(self, gates) -> None:
        for g in gates:
            self.append(g)

    @property
    def layers(self) -> list[Layer]:
        if self._layers is None:
            layers: list[Layer] = []
            used: set[int] = set()
            for g in self.gates:
                tag = "1q" if g.arity == 1 else "2q"
                if layers and layers[-1].tag == tag and not (used & set(g.qubits)):
                    layers[-1].gates.append(g)
                    used |= set(g.qubits)
                else:
                    layers.append(Layer(tag, [g]))
                    used = set(g.qubits)
            self._layers = layers
        return self._layers

    def layer_counts(self) -> tuple[int, int]:
        """(number of single-qubit layers, number of two-qubit layers)."""
        d1 = sum(1 for l in self.layers if l.tag == "1q")
        return d1, len(self.layers) - d1

    def gate_census(self) -> tuple[int, int]:
        n1 = sum(1 for g in self.gates if g.arity == 1)
        return n1, len(self.gates) - n1

    def dumps(self) -> str:
        lines = [f"qubits {self.n}"]
        for k, layer in enumerate(self.layers):
            if k:
                lines.append("---")
            for g in layer.gates:
                parts = [g.kind] + [str(q) for q in g.qubits]
                if g.angle is not None:
                    parts.append(f"{g.angle:.17g}")
                lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Circuit":
        lines = [l.strip() for l in text.splitlines()]
        lines = [l for l in lines if l and not l.startswith("#")]
        if not lines or not lines[0].lower().startswith("qubits"):
            raise ValueError("circuit text must start with a 'qubits N' line")
        circ = cls(int(lines[0].split()[1]))
        for line in lines[1:]:
            if line == "---":
                continue
            parts = line.split()
            kind = parts[0].upper()
            arity = 2 if kind in TWO_QUBIT_KINDS else 1
            qubits = tuple(int(p) for p in parts[1:1 + arity])
            angle = float(parts[1 + arity]) if len(parts) > 1 + arity else None
            circ.append(Gate(kind, qubits, angle))
        return circ

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "Circuit":
        with open(path) as fh:
            return cls.loads(fh.read())


# --- nearest-Clifford substitution --------------------------------------------

CLIFFORD_CANDIDATES = ("H", "X", "Y", "Z", "S", "SDG")


def process_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    d = u.shape[0]
    return float(np.abs(np.trace(u.conj().T @ v)) ** 2) / d ** 2


def nearest_clifford(gate: Gate, include_identity: bool = False) -> Gate:
    """Closest single-qubit Clifford by process fidelity, ties by candidate order."""
    if gate.arity != 1:
        raise ValueError("nearest_clifford applies to single-qubit gates only")
    u = gate.matrix()
    candidates = CLIFFORD_CANDIDATES + (("I",) if include_identity else ())
    best_kind, best_fid = None, -1.0
    for kind in candidates:
        v = np.eye(2, dtype=complex) if kind == "I" else _gate_matrix(kind, None)
        fid = process_fidelity(u, v)
        if fid > best_fid + 1e-12:
            best_kind, best_fid = kind, fid
    if best_kind == "I":
        return Gate("Z", gate.qubits)  # unreachable with default candidates
    return Gate(best_kind, gate.qubits)


def cliffordize(circuit: Circuit, include_identity: bool = False) -> Circuit:
    """Replace every non-Clifford single-qubit gate by its nearest Clifford.

    Preserves gate count, qubit assignment, and hence the layer structure.
    Non-Clifford two-qubit gates are rejected: pre-compile RZZ into
    CX - RZ - CX before calling.
    """
    out = Circuit(circuit.n)
    for g in circuit.gates:
        if g.arity == 2:
            if g.kind not in ("CX", "CZ"):
                raise CliffordizeError(
                    f"{g.kind} is not Clifford; pre-compile it to CX/CZ plus rotations")
            out.append(g)
        elif g.kind in CLIFFORD_1Q:
            out.append(g)
        else:
            out.append(nearest_clifford(g, include_identity=include_identity))
    return out


# --- Pauli-exponential compilation ---------------------------------------------

def pauli_exponential_gates(letters: str, alpha: float) -> list[Gate]:
    """Gates implementing exp(i * alpha * P) up to global phase.

    Basis-change conjugation (H for X, S†-H for Y), CX ladder onto the last
    support qubit, RZ(-2 alpha), then uncompute.
    """
    support = [q for q, ch in enumerate(letters) if ch != "I"]
    if not support:
        return []
    pre: list[Gate] = []
    post: list[Gate] = []  # already in inverse circuit order
    for q in support:
        ch = letters[q]
        if ch == "X":
            pre.append(Gate("H", (q,)))
            post.append(Gate("H", (q,)))
        elif ch == "Y":
            pre.extend([Gate("SDG", (q,)), Gate("H", (q,))])
            post.extend([Gate("H", (q,)), Gate("S", (q,))])
    ladder = [Gate("CX", (support[k], support[k + 1])) for k in range(len(support) - 1)]
    rot = [Gate("RZ", (support[-1],), -2.0 * alpha)]
    return pre + ladder + rot + list(reversed(ladder)) + post


# --- UCCSD ----------------------------------------------------------------------

def uccsd_excitations(r: int, n_electrons: int) -> list[tuple]:
    """Spin-preserving singles and doubles from the Hartree-Fock reference.

    Returns ``("s", i, a)`` and ``("d", i, j, a, b)`` tuples in a fixed
    canonical order (singles first, each sorted lexicographically).
    """
    occ = list(range(n_electrons))
    virt = list(range(n_electrons, r))
    singles = [("s", i, a) for i in occ for a in virt if i % 2 == a % 2]
    doubles = []
    for x, i in enumerate(occ):
        for j in occ[x + 1:]:
            for y, a in enumerate(virt):
                for b in virt[y + 1:]:
                    if (i % 2 + j % 2) == (a % 2 + b % 2):
                        doubles.append(("d", i, j, a, b))
    return singles + doubles


@lru_cache(maxsize=None)
def excitation_strings(excitation: tuple, r: int) -> tuple[tuple[str, float], ...]:
    """Jordan-Wigner strings of the anti-Hermitian generator T - T†.

    Each entry is ``(letters, beta)`` with the term equal to ``i * beta * P``;
    ``exp(theta (T - T†)) = prod_m exp(i theta beta_m P_m)``.
    """
    if excitation[0] == "s":
        _, i, a = excitation
        t = FermionTerm(1.0, ((a, True), (i, False)))
    else:
        _, i, j, a, b = excitation
        t = FermionTerm(1.0, ((a, True), (b, True), (j, False), (i, False)))
    tdag = t.dagger()
    gen = jordan_wigner_sum([t, FermionTerm(-tdag.coefficient, tdag.factors)], r)
    out = []
    for letters, coeff in gen.items():
        if abs(coeff.real) > 1e-12:
            raise AssertionError("generator must be anti-Hermitian")
        out.append((letters, float(coeff.imag)))
    return tuple(out)


def hartree_fock_gates(n_electrons: int) -> list[Gate]:
    return [Gate("X", (q,)) for q in range(n_electrons)]


def build_uccsd(sys, params: np.ndarray) -> Circuit:
    """First-order Trotterized UCCSD circuit from the Hartree-Fock reference."""
    excitations = uccsd_excitations(sys.r, sys.n_electrons)
    params = np.asarray(params, dtype=float)
    if params.shape != (len(excitations),):
        raise ValueError(f"expected {len(excitations)} parameters, got {params.shape}")
    circ = Circuit(sys.r, hartree_fock_gates(sys.n_electrons))
    for theta, exc in zip(params, excitations):
        for letters, beta in excitation_strings(exc, sys.r):
            circ.extend(pauli_exponential_gates(letters, theta * beta))
    return circ


def uccsd_parameter_count(sys) -> int:
    return len(uccsd_excitations(sys.r, sys.n_electrons))


# --- hardware-efficient ansatz ---------------------------------------------------

def hea_parameter_count(n: int, layers: int) -> int:
    return 2 * n * (layers + 1)


def build_hea(n: int, layers: int, params: np.ndarray) -> Circuit:
    """RY/RZ rotation walls alternating with linear CX entangler ladders."""
    params = np.asarray(params, dtype=float)
    expected = hea_parameter_count(n, layers)
    if params.shape != (expected,):
        raise ValueError(f"expected {expected} parameters, got {params.shape}")
    circ = Circuit(n)
    k = 0
    for wall in range(layers + 1):
        for q in range(n):
            circ.append(Gate("RY", (q,), params[k])); k += 1
        for q in range(n):
            circ.append(Gate("RZ", (q,), params[k])); k += 1
        if wall < layers:
            for q in range(n - 1):
                circ.append(Gate("CX", (q, q + 1)))
    return circ

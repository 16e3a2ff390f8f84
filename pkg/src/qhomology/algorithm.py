"""Hadamard-test state preparation, the Grover-like operator, phase
estimation, and the homology decision built on them.

The prepared state is ``(|+>|x> + |->|y>)/sqrt(2)`` with
``<x|y> = Omega(r) / (2 sqrt(c E') K)``. The operator
``G = U S0 U^dag Z_a`` has eigenphases ``±2θ`` on the plane containing that
state, where ``cos 2θ = -Re<x|y>``. Phase estimation reads ``f = 2θ / 2π``,
so a homologically trivial loop gives exactly ``f ∈ {1/4, 3/4}``.
"""
from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .cohomology import Cochain, CohomologyBasis, evaluate_cochain
from .mesh import EdgeTable, Mesh, genus
from .oracle import LoopSpec, OracleUnitary, build_oracle, status_width
from .statevec.circuit import RY, Circuit, H, X, Z
from .statevec.layout import RegisterLayout
from .statevec.simulator import OracleCounter, StateVector, apply, apply_inplace, inverse_qft, register_distribution
from .superpos import cochain_state_circuit

ENGINES = ("auto", "ladder", "power")
LADDER_QUBIT_LIMIT = 16


class AlgorithmError(ValueError):
    pass


@dataclass(frozen=True)
class AlgorithmConfig:
    K: int = 2
    phase_bits: int | None = None  # None: sized from the margin
    margin: int = 4
    shots: int = 256
    seed: int = 0
    exact: bool = False
    modulo: bool = False
    engine: str = "auto"
    workers: int = 1

    def __post_init__(self):
        status_width(self.K)
        if self.phase_bits is not None and self.phase_bits < 2:
            raise AlgorithmError("phase register needs at least 2 qubits")
        if self.shots < 1:
            raise AlgorithmError("shots must be at least 1")
        if self.engine not in ENGINES:
            raise AlgorithmError(f"engine must be one of {ENGINES}")

    @property
    def status_width(self) -> int:
        return status_width(self.K)

    def to_json(self) -> dict:
        return {"K": self.K, "p": self.phase_bits, "margin": self.margin, "shots": self.shots,
                "seed": self.seed, "mode": "exact" if self.exact else "qpe", "engine": self.engine,
                "modulo": self.modulo}


def required_phase_bits(c_alpha: int, padded_edges: int, K: int, margin: int = 4) -> int:
    """``floor(log2(sqrt(c E') K)) + margin``, computed in integer arithmetic."""
    x = int(c_alpha) * int(padded_edges) * int(K) ** 2
    if x < 1:
        raise AlgorithmError("c, E' and K must be positive")
    return (x.bit_length() - 1) // 2 + int(margin)


def overlap_scale(c_alpha: int, padded_edges: int, K: int) -> float:
    """Factor turning ``Re<x|y>`` into the cochain value."""
    return 2.0 * math.sqrt(c_alpha * padded_edges) * K


def _prep_layout(table: EdgeTable, K: int, phase_bits: int = 0) -> RegisterLayout:
    return RegisterLayout(table.width, status_width(K), phase_bits)


@dataclass(frozen=True, eq=False)
class StatePrep:
    circuit: Circuit
    layout: RegisterLayout
    oracle: OracleUnitary
    c_alpha: int
    method: str  # how the cochain state is prepared: interval or injection


def build_state_prep_U(cochain: Cochain, oracle: OracleUnitary, table: EdgeTable,
                       layout: RegisterLayout | None = None) -> StatePrep:
    layout = oracle.layout if layout is None else layout
    if layout != oracle.layout:
        raise AlgorithmError("oracle was built for a different register layout")
    if layout.edge_width != table.width:
        raise AlgorithmError("edge table does not match the register layout")
    n = layout.total_qubits
    a, o, t = layout.anchor, layout.orientation, layout.rotation
    K = 1 << layout.status_width
    prep, method = cochain_state_circuit(cochain, table, layout.edge, n)
    gates = [H(a, o), Z(o, controls=[(a, 0)])]
    gates += [g.with_controls([(a, 0)]) for g in prep.gates]
    if layout.edge:
        gates.append(H(*layout.edge, controls=[(a, 1)]))
    gates += oracle.circuit.gates
    s = layout.status
    for st in range(K):
        ctl = [(a, 0)] + [(q, st >> (len(s) - 1 - i) & 1) for i, q in enumerate(s)]
        gates.append(RY(st / K, t, controls=ctl))
    gates += oracle.inverse.gates
    gates.append(H(a))
    return StatePrep(Circuit(n, tuple(gates)), layout, oracle, cochain.support_size, method)


def prepare_state(prep: StatePrep, counter: OracleCounter | None = None) -> StateVector:
    return apply_inplace(prep.circuit, StateVector(prep.layout.total_qubits), counter)


def anchor_projections(state: StateVector, anchor: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Components of the state with the anchor projected onto ``|+>`` and ``|->``."""
    t = state.amplitudes.reshape((2,) * state.qubit_count)
    zero = np.take(t, 0, axis=anchor).reshape(-1)
    one = np.take(t, 1, axis=anchor).reshape(-1)
    return (zero + one) / math.sqrt(2), (zero - one) / math.sqrt(2)


def exact_overlap(prep: StatePrep, state: StateVector | None = None) -> float:
    """``Re<x|y>`` from the prepared state via ``2 <P+ phi | P- phi>``."""
    if state is None:
        state = prepare_state(prep)
    plus, minus = anchor_projections(state, prep.layout.anchor)
    for name, v in (("+", plus), ("-", minus)):
        nrm = float(np.vdot(v, v).real)
        if abs(nrm - 0.5) > 1e-9:
            raise AlgorithmError(f"anchor |{name}> projection has weight {nrm}, expected 1/2")
    return float((2 * np.vdot(plus, minus)).real)


def grover_operator(prep: StatePrep) -> Circuit:
    """``G = U S0 U^dag Z_a`` as a gate list on the system qubits."""
    lay = prep.layout
    sysq = lay.system_qubits
    U = prep.circuit.widened(lay.total_qubits)
    last = sysq - 1
    others = [(q, 0) for q in range(sysq) if q != last]
    s0 = (X(last), Z(last, controls=others), X(last))  # -1 on |0...0> only
    gates = (Z(lay.anchor),) + U.inverse().gates + s0 + U.gates
    return Circuit(lay.total_qubits, gates)


def grover_plane_spectrum(prep: StatePrep, G: Circuit | None = None) -> dict:
    """Restrict ``G`` to ``span{phi, G phi}`` and diagonalize the 2x2 block."""
    G = grover_operator(prep) if G is None else G
    phi = prepare_state(prep)
    g_phi = apply(G, phi)
    v0 = phi.amplitudes
    w = g_phi.amplitudes - np.vdot(v0, g_phi.amplitudes) * v0
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        basis = [v0]
    else:
        basis = [v0, w / nw]
    imgs = [apply(G, StateVector(phi.qubit_count, b)).amplitudes for b in basis]
    B = np.array(basis).T
    M = B.conj().T @ np.array(imgs).T
    residual = max(float(np.linalg.norm(img - B @ (B.conj().T @ img))) for img in imgs)
    eig = np.linalg.eigvals(M)
    eig = eig[np.argsort(np.angle(eig))]
    return {
        "eigenvalues": eig,
        "cos_2theta": float(np.mean(eig.real)),
        "residual": residual,
        "matrix": M,
    }


def fraction_to_overlap(m: int, p: int) -> float:
    N = 1 << p
    m %= N
    return -math.cos(2 * math.pi * min(m, N - m) / N)  # both eigenphase signs give the same value


def merged_bins(dist: np.ndarray) -> np.ndarray:
    """Fold outcome ``m`` onto ``2^p - m``; index ``m`` runs over ``0..2^(p-1)``."""
    N = len(dist)
    half = N // 2
    out = np.zeros(half + 1, dtype=dist.dtype)
    out[0] = dist[0]
    out[half] = dist[half]
    for m in range(1, half):
        out[m] = dist[m] + dist[N - m]
    return out


def modal_bin(dist: np.ndarray) -> int:
    merged = merged_bins(dist)
    return int(np.argmax(merged))  # argmax returns the first maximum


@dataclass(frozen=True, eq=False)
class PhaseEstimate:
    histogram: dict[int, int]
    distribution: np.ndarray = field(repr=False)
    phase_bits: int
    modal_bin: int
    recovered_overlap: float
    recovered_omega: float
    oracle_calls: int
    engine: str

    @property
    def modal_probability(self) -> float:
        return float(merged_bins(self.distribution)[self.modal_bin])


def _choose_engine(engine: str, total_qubits: int) -> str:
    if engine != "auto":
        return engine
    return "ladder" if total_qubits <= LADDER_QUBIT_LIMIT else "power"


def qpe_distribution(prep: StatePrep, p: int, engine: str = "auto",
                     counter: OracleCounter | None = None) -> tuple[np.ndarray, str]:
    """Exact outcome distribution of the phase register after inverse QFT."""
    if p < 2:
        raise AlgorithmError("phase register needs at least 2 qubits")
    lay = prep.layout.with_phase_bits(p)
    engine = _choose_engine(engine, lay.total_qubits)
    sysq = lay.system_qubits
    mini_U = Circuit(sysq, prep.circuit.gates)
    base = replace(prep, circuit=mini_U, layout=prep.layout.with_phase_bits(0))
    G = grover_operator(base)
    if engine == "ladder":
        big_U = mini_U.widened(lay.total_qubits)
        big_G = G.widened(lay.total_qubits)
        state = apply_inplace(big_U, StateVector(lay.total_qubits), counter)
        phase = lay.phase
        apply_inplace(Circuit(lay.total_qubits, (H(*phase),)), state)
        for i, q in enumerate(phase):
            cg = big_G.controlled(q)
            for _ in range(1 << (p - 1 - i)):
                apply_inplace(cg, state, counter)
        apply_inplace(inverse_qft(phase, lay.total_qubits), state)
        dist = register_distribution(state, phase)
    elif engine == "power":
        N = 1 << p
        v = StateVector(sysq)
        apply_inplace(mini_U, v, counter)
        powers = np.empty((N, 1 << sysq), dtype=complex)
        powers[0] = v.amplitudes
        for k in range(1, N):
            apply_inplace(G, v, counter)
            powers[k] = v.amplitudes
        spectrum = np.fft.fft(powers, axis=0)
        dist = (np.abs(spectrum) ** 2).sum(axis=1) / (N * N)
    else:
        raise AlgorithmError(f"unknown engine {engine!r}")
    total = dist.sum()
    if abs(total - 1) > 1e-9:
        raise AlgorithmError(f"phase distribution sums to {total}")
    return dist / total, engine


def qpe_estimate(prep: StatePrep, config: AlgorithmConfig, p: int | None = None, seed: int | None = None,
                 table_size: int | None = None) -> PhaseEstimate:
    if p is None:
        p = config.phase_bits
    if p is None:
        raise AlgorithmError("phase width not given")
    counter = OracleCounter()
    dist, engine = qpe_distribution(prep, p, config.engine, counter)
    rng = np.random.default_rng(config.seed if seed is None else seed)
    counts = rng.multinomial(config.shots, dist)
    hist = {int(m): int(c) for m, c in enumerate(counts) if c}
    m = modal_bin(counts.astype(float))
    overlap = fraction_to_overlap(m, p)
    E = (1 << prep.layout.edge_width) if table_size is None else table_size
    omega = overlap * overlap_scale(prep.c_alpha, E, 1 << prep.layout.status_width)
    return PhaseEstimate(hist, dist, p, m, overlap, omega, counter.value, engine)


@dataclass(frozen=True)
class AlphaResult:
    alpha: int
    c_alpha: int
    omega_quantum: float
    omega_classical: int
    trivial: bool
    overlap: float
    gap: float
    phase_bits: int | None
    oracle_calls: int
    prep_method: str
    engine: str | None = None
    histogram: dict[int, int] | None = None
    modal_probability: float | None = None

    def to_json(self) -> dict:
        out = {
            "alpha": self.alpha,
            "c_alpha": self.c_alpha,
            "omega_quantum": self.omega_quantum,
            "omega_classical": self.omega_classical,
            "trivial": self.trivial,
            "overlap": self.overlap,
            "gap": self.gap,
            "p": self.phase_bits,
            "oracle_calls": self.oracle_calls,
            "state_prep": self.prep_method,
            "engine": self.engine,
        }
        if self.histogram is not None:
            out["histogram"] = {str(k): v for k, v in sorted(self.histogram.items())}
        return out


@dataclass(frozen=True)
class HomologyVerdict:
    per_alpha: tuple[AlphaResult, ...]
    mesh_summary: dict
    config: AlgorithmConfig

    @property
    def trivial(self) -> bool:
        return all(r.trivial for r in self.per_alpha)

    @property
    def omegas(self) -> tuple[float, ...]:
        return tuple(r.omega_quantum for r in self.per_alpha)

    @property
    def rounded(self) -> tuple[int, ...]:
        return tuple(int(round(r.omega_quantum)) for r in self.per_alpha)

    @property
    def classical(self) -> tuple[int, ...]:
        return tuple(r.omega_classical for r in self.per_alpha)

    @property
    def oracle_calls(self) -> int:
        return sum(r.oracle_calls for r in self.per_alpha)

    def to_json(self) -> dict:
        return {
            "mesh": self.mesh_summary,
            "config": self.config.to_json(),
            "per_alpha": [r.to_json() for r in self.per_alpha],
            "verdict": "trivial" if self.trivial else "nontrivial",
            "oracle_calls": self.oracle_calls,
        }


def mesh_summary(mesh: Mesh) -> dict:
    return {"V": mesh.V, "E": mesh.E, "F": mesh.F, "genus": genus(mesh)}


def _prepare_loop(loop: LoopSpec, config: AlgorithmConfig) -> LoopSpec:
    if loop.K != config.K or loop.modulo != config.modulo:
        loop = loop.with_modulus(config.K, config.modulo)
    return loop


def run_alpha(cobasis: CohomologyBasis, alpha: int, loop: LoopSpec, config: AlgorithmConfig) -> AlphaResult:
    cochain = cobasis[alpha]
    table = cobasis.table_for(alpha)
    c = cochain.support_size
    E = table.padded_count
    classical = evaluate_cochain(cochain, loop.chain())
    layout = _prep_layout(table, loop.K)
    oracle = build_oracle(loop, table, layout)
    prep = build_state_prep_U(cochain, oracle, table, layout)
    gap = 1.0 / overlap_scale(c, E, loop.K)
    if config.exact:
        counter = OracleCounter()
        state = prepare_state(prep, counter)
        ov = exact_overlap(prep, state)
        omega = ov * overlap_scale(c, E, loop.K)
        return AlphaResult(alpha, c, omega, classical, abs(omega) < 0.5, ov, gap, None,
                           counter.value, prep.method, "exact")
    p = config.phase_bits or required_phase_bits(c, E, loop.K, config.margin)
    est = qpe_estimate(prep, config, p, seed=config.seed + alpha, table_size=E)
    return AlphaResult(alpha, c, est.recovered_omega, classical, abs(est.recovered_omega) < 0.5,
                       est.recovered_overlap, gap, p, est.oracle_calls, prep.method, est.engine,
                       est.histogram, est.modal_probability)


def detect_homology(mesh: Mesh, cobasis: CohomologyBasis, loop: LoopSpec,
                    config: AlgorithmConfig = AlgorithmConfig()) -> HomologyVerdict:
    """Run every α independently and flag the loop trivial iff all ``|Ω̂_α| < 0.5``."""
    loop = _prepare_loop(loop, config).validate(mesh)
    alphas = range(len(cobasis))
    if config.workers > 1 and len(cobasis) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(lambda a: run_alpha(cobasis, a, loop, config), alphas))
    else:
        results = [run_alpha(cobasis, a, loop, config) for a in alphas]
    return HomologyVerdict(tuple(results), mesh_summary(mesh), config)


def classical_verdict(cobasis: CohomologyBasis, loop: LoopSpec) -> tuple[int, ...]:
    return tuple(evaluate_cochain(w, loop.chain()) for w in cobasis.cochains)


def winding_numbers(mesh: Mesh, cobasis: CohomologyBasis, loop: LoopSpec,
                    config: AlgorithmConfig = AlgorithmConfig()) -> tuple[tuple[int, int], HomologyVerdict]:
    if genus(mesh) != 1 or len(cobasis) != 2:
        raise AlgorithmError("winding numbers need a genus-1 mesh")
    verdict = detect_homology(mesh, cobasis, loop, config)
    w1, w2 = verdict.rounded
    return (w1, w2), verdict


NOT_HOMOTOPIC = "NOT_HOMOTOPIC"
INCONCLUSIVE = "INCONCLUSIVE"


def loop_difference(first: LoopSpec, second: LoopSpec) -> LoopSpec:
    """``first · second⁻¹`` with opposite half-edges of each edge cancelled."""
    return first.combined(second.reversed(), cancel=True)


def homotopy_not_equivalent(mesh: Mesh, cobasis: CohomologyBasis, first: LoopSpec, second: LoopSpec,
                            config: AlgorithmConfig = AlgorithmConfig()) -> tuple[str, HomologyVerdict, LoopSpec]:
    """Homologically distinct loops are not homotopic; equal classes prove nothing."""
    if (first.base_vertex is not None and second.base_vertex is not None
            and first.base_vertex != second.base_vertex):
        warnings.warn(f"loops start at different vertices ({first.base_vertex}, {second.base_vertex})",
                      stacklevel=2)
    combined = loop_difference(_prepare_loop(first, config), _prepare_loop(second, config))
    verdict = detect_homology(mesh, cobasis, combined, config)
    return (INCONCLUSIVE if verdict.trivial else NOT_HOMOTOPIC), verdict, combined


def default_seed() -> int:
    return int(os.environ.get("QHOMOLOGY_SEED", "0"))

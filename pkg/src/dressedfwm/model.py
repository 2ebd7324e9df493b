"""Atomic side of the coupled atom-field dynamics.

The atom is described by the vector of operators ``X = (s_11, s_12, ..., s_dd)``
with ``s_ij = |i><j|`` in row-major order. Their Heisenberg-Langevin equations,
linearised around the pump-only steady state, read::

    dX/dt = M X + G_x A + F,        (d/dt + c d/dz) A = N T X

where ``A = (a, a^dag, b, b^dag)`` holds the two quantized modes. Everything in
this module is expressed in rad/s with hbar = 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

C_LIGHT = 299_792_458.0
TWO_PI = 2.0 * np.pi

MODE_ORDER = ("a", "a_dag", "b", "b_dag")


class ConfigurationError(ValueError):
    """Raised for an inconsistent level scheme or drive specification."""


class DegenerateSteadyStateError(RuntimeError):
    """The pump-only generator does not have a unique stationary state."""


@dataclass(frozen=True)
class Transition:
    lower: str
    upper: str
    role: str  # "pump" / "dressing" for classical drives, "a" / "b" for modes


@dataclass(frozen=True)
class Decay:
    """Spontaneous emission out of ``level`` at ``rate``, split by ``branching``."""

    level: str
    rate: float
    branching: dict[str, float]


@dataclass(frozen=True)
class LevelScheme:
    """Declarative description of the atom.

    ``energies`` are level energies in rad/s after removing a nominal optical
    frequency per manifold (ground levels carry their hyperfine offsets,
    excited levels are referenced to the nominal transition they sit on). Field
    frequencies are measured in the same reduced units, so the detuning of a
    field on ``lower -> upper`` is ``f - (E_upper - E_lower)``.
    """

    labels: tuple[str, ...]
    energies: tuple[float, ...]
    ground_levels: tuple[str, ...]
    decays: tuple[Decay, ...]
    classical_transitions: tuple[Transition, ...]
    quantized_transitions: tuple[Transition, ...] = ()
    ground_coherence_decay: float = 0.0
    ground_exchange_rate: float = 0.0
    hyperfine_splitting: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigurationError("; ".join(problems))

    @property
    def level_count(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @property
    def excited_levels(self) -> tuple[str, ...]:
        return tuple(lab for lab in self.labels if lab not in self.ground_levels)

    def problems(self) -> list[str]:
        out = []
        labels = set(self.labels)
        if len(labels) != len(self.labels):
            out.append("duplicate level labels")
        if len(self.energies) != len(self.labels):
            out.append("energies and labels differ in length")
        for g in self.ground_levels:
            if g not in labels:
                out.append(f"ground level {g!r} is not declared")
        for rate_name in ("ground_coherence_decay", "ground_exchange_rate"):
            if getattr(self, rate_name) < 0:
                out.append(f"{rate_name} must be >= 0")
        if self.ground_exchange_rate > self.ground_coherence_decay + 1e-300:
            out.append("ground_exchange_rate cannot exceed ground_coherence_decay")
        for d in self.decays:
            if d.level not in labels:
                out.append(f"decay from undeclared level {d.level!r}")
            if d.rate < 0:
                out.append(f"decay rate of {d.level!r} must be >= 0")
            if any(f < 0 for f in d.branching.values()):
                out.append(f"negative branching fraction out of {d.level!r}")
            if abs(sum(d.branching.values()) - 1.0) > 1e-12:
                out.append(f"branching out of {d.level!r} does not sum to 1")
            for target in d.branching:
                if target not in labels or target == d.level:
                    out.append(f"bad decay target {target!r} from {d.level!r}")
        for t in self.classical_transitions + self.quantized_transitions:
            if t.lower not in labels or t.upper not in labels:
                out.append(f"transition {t.lower}->{t.upper} references undeclared level")
            elif t.lower == t.upper:
                out.append(f"transition {t.lower}->{t.upper} is not between distinct levels")
        for t in self.classical_transitions:
            if t.role not in ("pump", "dressing"):
                out.append(f"classical transition role {t.role!r} not in (pump, dressing)")
        if self.quantized_transitions:
            roles = sorted(t.role for t in self.quantized_transitions)
            pairs = {frozenset((t.lower, t.upper)) for t in self.quantized_transitions}
            if roles != ["a", "b"] or len(pairs) != 2:
                out.append("need exactly two quantized transitions (a, b) on distinct level pairs")
        return out

    def transition(self, role: str) -> Transition:
        for t in self.classical_transitions + self.quantized_transitions:
            if t.role == role:
                return t
        raise KeyError(role)

    def transitions_with_role(self, role: str) -> tuple[Transition, ...]:
        return tuple(t for t in self.classical_transitions if t.role == role)


def rb_double_lambda(
    gamma: float = TWO_PI * 5.7e6,
    ground_decay: float = TWO_PI * 1.0e6,
    dressing_decay: float = TWO_PI * 1.0e6,
    hyperfine: float = TWO_PI * 3.035e9,
    ground_exchange: float | None = None,
    branching: float = 0.5,
    dressed: bool = True,
) -> LevelScheme:
    """Double-Lambda scheme on the Rb D1 line, optionally with the ladder level 5.

    Levels 1 and 2 are the hyperfine ground states (2 above 1 by ``hyperfine``),
    3 and 4 the excited states, 5 the upper level reached by the dressing field
    from 3. The pump drives 1->3 and 2->4, mode a couples 2->3, mode b 1->4.
    ``branching`` is the fraction of 3 and 4 decaying to level 1.
    """
    labels = ("1", "2", "3", "4", "5") if dressed else ("1", "2", "3", "4")
    energies = (0.0, hyperfine, 0.0, 0.0, 0.0)[: len(labels)]
    decays = [
        Decay("3", gamma, {"1": branching, "2": 1.0 - branching}),
        Decay("4", gamma, {"1": branching, "2": 1.0 - branching}),
    ]
    classical = [Transition("1", "3", "pump"), Transition("2", "4", "pump")]
    if dressed:
        decays.append(Decay("5", dressing_decay, {"3": 1.0}))
        classical.append(Transition("3", "5", "dressing"))
    return LevelScheme(
        labels=labels,
        energies=energies,
        ground_levels=("1", "2"),
        decays=tuple(
            Decay(d.level, d.rate, {k: v for k, v in d.branching.items() if v > 0})
            for d in decays
        ),
        classical_transitions=tuple(classical),
        quantized_transitions=(Transition("2", "3", "a"), Transition("1", "4", "b")),
        ground_coherence_decay=ground_decay,
        ground_exchange_rate=ground_decay if ground_exchange is None else ground_exchange,
        hyperfine_splitting=hyperfine,
        name="rb-double-lambda" if dressed else "rb-double-lambda-4",
    )


@dataclass(frozen=True)
class DriveParameters:
    """Classical drives, mode couplings and medium geometry (SI, rad/s).

    ``wavenumbers`` are the z-projections magnitudes per field role and
    ``propagation_signs`` the direction of each classical field relative to the
    probe (+1 co-propagating, -1 counter-propagating). ``k_residual`` is the
    small wavevector mismatch handed to the probe (-) and conjugate (+) so that
    ``k_a + k_b = 2 k_0`` stays exact.
    """

    pump_rabi: float
    dressing_rabi: float = 0.0
    one_photon_detuning: float = 0.0
    two_photon_detuning: float = 0.0
    dressing_detuning: float = 0.0
    g_a: float = 1.0
    g_b: float = 1.0
    atom_number: float = 0.0
    length: float = 0.0125
    area: float = 1.0e-6
    wavenumbers: dict[str, float] = field(
        default_factory=lambda: {"pump": TWO_PI / 794.98e-9, "dressing": TWO_PI / 762.1e-9}
    )
    propagation_signs: dict[str, int] = field(
        default_factory=lambda: {"pump": 1, "dressing": -1}
    )
    k_residual: float = 0.0

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ConfigurationError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if not self.pump_rabi > 0:
            out.append("pump_rabi must be > 0")
        if self.g_a < 0 or self.g_b < 0:
            out.append("g_a and g_b must be >= 0")
        if not self.length > 0:
            out.append("length must be > 0")
        if self.atom_number < 0:
            out.append("atom_number must be >= 0")
        if not self.area > 0:
            out.append("area must be > 0")
        for role, s in self.propagation_signs.items():
            if s not in (1, -1):
                out.append(f"propagation sign of {role!r} must be +1 or -1")
        return out

    @property
    def density(self) -> float:
        """Atomic number density N / (A L) in m^-3."""
        return self.atom_number / (self.area * self.length)

    def replace(self, **changes) -> "DriveParameters":
        from dataclasses import replace

        return replace(self, **changes)


def coupling_constant(dipole: float, angular_frequency: float, volume: float) -> float:
    """Single-photon coupling g = p * sqrt(hbar w / (2 eps0 V)) / hbar in rad/s."""
    from scipy.constants import epsilon_0, hbar

    field_per_photon = np.sqrt(hbar * angular_frequency / (2.0 * epsilon_0 * volume))
    return dipole * field_per_photon / hbar


def field_frequencies(
    scheme: LevelScheme, drives: DriveParameters, velocity: float = 0.0
) -> dict[str, float]:
    """Reduced field frequencies (rad/s) seen by atoms moving at ``velocity``.

    The pump is detuned by ``one_photon_detuning`` from its first transition, the
    dressing field by ``dressing_detuning``. Mode a closes the Raman resonance
    with the pump up to ``two_photon_detuning`` and mode b follows from
    ``2 w_0 = w_a + w_b``.
    """
    k = drives.wavenumbers
    sign = drives.propagation_signs
    k0 = k.get("pump", 0.0)
    pumps = scheme.transitions_with_role("pump")
    first_pump = pumps[0]
    f_pump0 = drives.one_photon_detuning + (
        scheme.energies[scheme.index(first_pump.upper)]
        - scheme.energies[scheme.index(first_pump.lower)]
    )
    freqs = {"pump": f_pump0 - sign.get("pump", 1) * k0 * velocity}
    if scheme.transitions_with_role("dressing"):
        t = scheme.transitions_with_role("dressing")[0]
        e_gap = scheme.energies[scheme.index(t.upper)] - scheme.energies[scheme.index(t.lower)]
        freqs["dressing"] = (
            drives.dressing_detuning
            + e_gap
            - sign.get("dressing", -1) * k.get("dressing", k0) * velocity
        )
    if scheme.quantized_transitions:
        ta = scheme.transition("a")
        # pump leg sharing the upper level of mode a
        leg = next((p for p in pumps if p.upper == ta.upper), None)
        if leg is None:
            raise ConfigurationError("mode a must share its upper level with a pump leg")
        raman_gap = (
            scheme.energies[scheme.index(ta.lower)] - scheme.energies[scheme.index(leg.lower)]
        )
        f_a0 = f_pump0 - raman_gap - drives.two_photon_detuning
        f_a = f_a0 - (k0 - drives.k_residual) * velocity
        freqs["a"] = f_a
        freqs["b"] = 2.0 * freqs["pump"] - f_a
    return freqs


def frame_energies(scheme: LevelScheme, freqs: dict[str, float]) -> np.ndarray:
    """Diagonal of the rotating-frame Hamiltonian.

    Walks the graph of driven transitions from the first level, setting
    ``E_upper = E_lower - detuning``; every redundant edge (closed loop) must
    agree, which is where energy conservation of the mixing process enters.
    """
    d = scheme.level_count
    edges = []
    for t in scheme.classical_transitions + scheme.quantized_transitions:
        if t.role not in freqs:
            continue
        lo, up = scheme.index(t.lower), scheme.index(t.upper)
        detuning = freqs[t.role] - (scheme.energies[up] - scheme.energies[lo])
        edges.append((lo, up, detuning))
    diag = np.full(d, np.nan)
    diag[0] = 0.0
    changed = True
    while changed:
        changed = False
        for lo, up, det in edges:
            if np.isnan(diag[up]) and not np.isnan(diag[lo]):
                diag[up] = diag[lo] - det
                changed = True
            elif np.isnan(diag[lo]) and not np.isnan(diag[up]):
                diag[lo] = diag[up] + det
                changed = True
    # undriven levels keep their bare reduced energy
    for i in range(d):
        if np.isnan(diag[i]):
            diag[i] = scheme.energies[i]
    scale = max(1.0, max(abs(v) for _, _, v in edges) if edges else 1.0)
    for lo, up, det in edges:
        if abs(diag[up] - (diag[lo] - det)) > 1e-9 * scale:
            raise ConfigurationError(
                f"inconsistent field frequencies around transition "
                f"{scheme.labels[lo]}->{scheme.labels[up]}"
            )
    return diag


def unit_operator(d: int, i: int, j: int) -> np.ndarray:
    op = np.zeros((d, d), dtype=complex)
    op[i, j] = 1.0
    return op


def jump_operators(scheme: LevelScheme) -> list[np.ndarray]:
    """Lindblad operators (rate folded in) for decay and ground relaxation."""
    d = scheme.level_count
    ops = []
    for dec in scheme.decays:
        e = scheme.index(dec.level)
        for target, frac in dec.branching.items():
            rate = dec.rate * frac
            if rate > 0:
                ops.append(np.sqrt(rate) * unit_operator(d, scheme.index(target), e))
    if len(scheme.ground_levels) == 2:
        g1, g2 = (scheme.index(g) for g in scheme.ground_levels)
        r = scheme.ground_exchange_rate
        if r > 0:
            ops.append(np.sqrt(r) * unit_operator(d, g1, g2))
            ops.append(np.sqrt(r) * unit_operator(d, g2, g1))
        # pure dephasing tops the coherence decay up to the requested value
        extra = scheme.ground_coherence_decay - r
        if extra > 0:
            ops.append(np.sqrt(2.0 * extra) * unit_operator(d, g2, g2))
    return ops


def heisenberg_generator(hamiltonian: np.ndarray, jumps: list[np.ndarray]) -> np.ndarray:
    """Matrix ``M`` with ``d<s_mu>/dt = sum_nu M[mu, nu] <s_nu>``.

    Built from the row-major superoperator of the adjoint Lindblad generator
    ``L'(O) = i[H, O] + sum_k (L_k^dag O L_k - {L_k^dag L_k, O}/2)``; ``M`` is its
    transpose because ``L'(s_mu)`` is expanded on the basis ``s_nu``.
    """
    d = hamiltonian.shape[0]
    eye = np.eye(d)
    sup = 1j * (np.kron(hamiltonian, eye) - np.kron(eye, hamiltonian.T))
    for L in jumps:
        LdL = L.conj().T @ L
        sup += np.kron(L.conj().T, L.T) - 0.5 * np.kron(LdL, eye) - 0.5 * np.kron(eye, LdL.T)
    return sup.T


def population_indices(d: int) -> np.ndarray:
    return np.arange(d) * (d + 1)


def expectation(op: np.ndarray, x: np.ndarray) -> complex:
    """<O> for ``O = sum O_kl s_kl`` given ``x_kl = <s_kl>``."""
    return complex(np.sum(op.reshape(-1) * x))


def steady_state(M: np.ndarray, rtol: float = 1e-9) -> np.ndarray:
    """Unit-trace null vector of ``M``; raises when the null space is not 1-D."""
    d2 = M.shape[0]
    d = int(round(np.sqrt(d2)))
    sv = np.linalg.svd(M, compute_uv=False)
    scale = max(sv[0], 1e-300)
    nullity = int(np.sum(sv < rtol * scale))
    if nullity != 1:
        raise DegenerateSteadyStateError(
            f"pump-only generator has a {nullity}-dimensional null space; "
            "a ground population exchange rate is probably missing"
        )
    pops = population_indices(d)
    # replace one population equation by the trace condition
    A = M.copy()
    A[pops[0], :] = 0.0
    A[pops[0], pops] = 1.0
    rhs = np.zeros(d2, dtype=complex)
    rhs[pops[0]] = 1.0
    x = np.linalg.solve(A, rhs)
    # symmetrise against round-off: x_ij = conj(x_ji)
    X = x.reshape(d, d)
    X = 0.5 * (X + X.conj().T)
    np.fill_diagonal(X, X.diagonal().real)
    return X.reshape(-1)


def resolvent_solve(M: np.ndarray, B: np.ndarray, omega: float = 0.0) -> np.ndarray:
    """Solve ``(i omega + M) Y = B``.

    ``M`` always has the steady state as a null vector (the identity operator is
    conserved), so at ``omega = 0`` the system is solved on the traceless
    subspace: one population row is swapped for the trace condition. This is
    exact because the population rows of ``M`` sum to zero, and the sources
    ``B`` (``G_x`` columns, Langevin forces) carry no trace.
    """
    d2 = M.shape[0]
    A = M + 1j * omega * np.eye(d2)
    if omega != 0.0:
        return np.linalg.solve(A, B)
    d = int(round(np.sqrt(d2)))
    pops = population_indices(d)
    A = A.copy()
    A[pops[0], :] = 0.0
    A[pops[0], pops] = 1.0
    B = np.array(B, dtype=complex, copy=True)
    B[pops[0]] = 0.0
    return np.linalg.solve(A, B)


def diffusion_matrix(
    jumps: list[np.ndarray],
    x_s: np.ndarray,
    mode: Literal["einstein", "identity"] | None = "einstein",
) -> np.ndarray:
    """Langevin force correlations ``<F_mu(t) F_nu(t')> = D[mu, nu] delta(t - t')``.

    ``einstein`` uses the generalised Einstein relation for Lindblad damping,
    ``D[mu, nu] = sum_k <[L_k^dag, s_mu][s_nu, L_k]>`` at the steady state.
    ``identity`` returns the delta-normalised table ``delta_{mu,nu}``; ``None``
    skips the computation (zeros), for carrier-only work.
    """
    d2 = x_s.size
    if mode is None:
        return np.zeros((d2, d2), dtype=complex)
    if mode == "identity":
        return np.eye(d2, dtype=complex)
    if mode != "einstein":
        raise ConfigurationError(f"unknown diffusion mode {mode!r}")
    d = int(round(np.sqrt(d2)))
    basis = np.zeros((d2, d, d), dtype=complex)
    basis[np.arange(d2), np.arange(d2) // d, np.arange(d2) % d] = 1.0
    X = x_s.reshape(d, d)
    D = np.zeros((d2, d2), dtype=complex)
    for L in jumps:
        Ld = L.conj().T
        left = np.einsum("km,amn->akn", Ld, basis) - np.einsum("akm,mn->akn", basis, Ld)
        right = np.einsum("bkm,mn->bkn", basis, L) - np.einsum("km,bmn->bkn", L, basis)
        D += np.einsum("akm,bml,kl->ab", left, right, X, optimize=True)
    return D


@dataclass(frozen=True)
class LiouvilleSystem:
    """Linearised atomic generator for one velocity class and one parameter point."""

    M: np.ndarray
    G_x: np.ndarray
    T: np.ndarray
    D: np.ndarray
    x_s: np.ndarray
    hamiltonian: np.ndarray
    jumps: tuple[np.ndarray, ...]
    atom_number: float
    labels: tuple[str, ...]

    def __post_init__(self):
        for arr in (self.M, self.G_x, self.T, self.D, self.x_s, self.hamiltonian):
            arr.setflags(write=False)

    @property
    def level_count(self) -> int:
        return len(self.labels)

    @property
    def dim(self) -> int:
        return self.M.shape[0]

    def populations(self) -> np.ndarray:
        return self.x_s[population_indices(self.level_count)].real


def classical_hamiltonian(
    scheme: LevelScheme, drives: DriveParameters, velocity: float = 0.0
) -> np.ndarray:
    d = scheme.level_count
    if drives.dressing_rabi != 0 and not scheme.transitions_with_role("dressing"):
        raise ConfigurationError(
            f"dressing_rabi != 0 but scheme {scheme.name!r} (d = {d}) has no dressing transition"
        )
    freqs = field_frequencies(scheme, drives, velocity)
    H = np.diag(frame_energies(scheme, freqs)).astype(complex)
    rabi = {"pump": drives.pump_rabi, "dressing": drives.dressing_rabi}
    for t in scheme.classical_transitions:
        lo, up = scheme.index(t.lower), scheme.index(t.upper)
        H[up, lo] += rabi[t.role]
        H[lo, up] += np.conj(rabi[t.role])
    return H


def mode_operators(scheme: LevelScheme, drives: DriveParameters) -> list[np.ndarray]:
    """Atomic operators multiplying (a, a^dag, b, b^dag) in the interaction."""
    d = scheme.level_count
    ta, tb = scheme.transition("a"), scheme.transition("b")
    ia, ja = scheme.index(ta.upper), scheme.index(ta.lower)
    ib, jb = scheme.index(tb.upper), scheme.index(tb.lower)
    return [
        drives.g_a * unit_operator(d, ia, ja),
        drives.g_a * unit_operator(d, ja, ia),
        drives.g_b * unit_operator(d, ib, jb),
        drives.g_b * unit_operator(d, jb, ib),
    ]


def build_liouville_system(
    scheme: LevelScheme,
    drives: DriveParameters,
    velocity: float = 0.0,
    diffusion: Literal["einstein", "identity"] = "einstein",
) -> LiouvilleSystem:
    """Assemble ``M``, ``G_x``, ``T``, ``D`` and the pump-only steady state.

    Parameters
    ----------
    scheme, drives
        Level structure and drive settings.
    velocity
        Atomic velocity along z in m/s; shifts every field by its Doppler term.
    diffusion
        ``"einstein"`` (default) or ``"identity"``, see :func:`diffusion_matrix`.
    """
    d = scheme.level_count
    H = classical_hamiltonian(scheme, drives, velocity)
    jumps = jump_operators(scheme)
    M = heisenberg_generator(H, jumps)
    x_s = steady_state(M)

    d2 = d * d
    G = np.zeros((d2, 4), dtype=complex)
    T = np.zeros((4, d2), dtype=complex)
    if scheme.quantized_transitions:
        V = mode_operators(scheme, drives)
        X = x_s.reshape(d, d)
        for m, Vm in enumerate(V):
            # d<s_ij>/dt gains i <[V_m, s_ij]> A_m = i (V^T X - X V^T)_ij A_m
            G[:, m] = 1j * (Vm.T @ X - X @ Vm.T).reshape(-1)
        # (d/dt + c d/dz) A_m = i N <[H_q, A_m]>: a <- -i V_{a^dag}, a^dag <- +i V_a
        partner = (1, 0, 3, 2)
        sign = (-1j, 1j, -1j, 1j)
        for m in range(4):
            T[m] = sign[m] * V[partner[m]].reshape(-1)
    D = diffusion_matrix(jumps, x_s, diffusion)
    return LiouvilleSystem(
        M=M,
        G_x=G,
        T=T,
        D=D,
        x_s=x_s,
        hamiltonian=H,
        jumps=tuple(jumps),
        atom_number=drives.atom_number,
        labels=scheme.labels,
    )


def solve_pump_steady_state(system: LiouvilleSystem) -> np.ndarray:
    """Pump-only stationary vector of ``system.M`` (unit population trace)."""
    return steady_state(np.asarray(system.M))


def build_diffusion_matrix(
    system: LiouvilleSystem, mode: Literal["einstein", "identity"] = "einstein"
) -> np.ndarray:
    return diffusion_matrix(list(system.jumps), np.asarray(system.x_s), mode)

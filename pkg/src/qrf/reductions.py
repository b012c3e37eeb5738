"""Jumping into a frame perspective.

Schroedinger reduction conditions gauge-invariant states on a frame
orientation; with the sqrt(Vol) scale attached it is an isometry from the
physical space onto the physical system subspace.  The Heisenberg route
first disentangles the frame into a reproducing-phase state |theta> and is
available whenever such phases exist (always for ideal frames, by Fourier
scan for U(1); SU(2) frames report NotFound).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import Frame
from .linalg import DEFAULT_TOL, Tolerance, as_cmatrix, as_cvector, dagger
from .perspective import (
    PhysicalSpace,
    Scenario,
    relational_observable,
    sample_elements,
    system_projector,
)

__all__ = [
    "ReductionMap",
    "ThetaState",
    "ThetaNotFound",
    "schrodinger_reduce",
    "schrodinger_inverse",
    "schrodinger_map",
    "conditional_probability",
    "multi_event_probability",
    "solve_theta",
    "disentangler",
    "heisenberg_reduce",
]

_THETA_MAX_ITER = 10_000


@dataclass
class ReductionMap:
    """Rectangular matrix from physical-basis coefficients to the system factor."""

    kind: str  # "schrodinger" | "heisenberg"
    frame_name: str
    orientation: object
    matrix: np.ndarray          # (complement_dim, n_phys)
    inverse_matrix: np.ndarray  # (n_phys, complement_dim)
    scale_notes: dict


@dataclass
class ThetaState:
    """Reproducing-phase frame state |theta> = sum_g w_g N(g) |phi(g)>."""

    frame_name: str
    vector: np.ndarray
    phases: np.ndarray | None = None  # finite groups: N(g) per element
    fourier_k: int | None = None      # U(1): N(theta) = exp(i k theta)
    residual: float = 0.0

    def phase_at(self, frame: Frame, g) -> complex:
        el = frame.rep.element(g)
        if self.phases is not None:
            return complex(self.phases[el.index])
        return complex(np.exp(1j * self.fourier_k * el.coords[0]))


@dataclass
class ThetaNotFound:
    reason: str
    residual: float | None = None


def _require_physical(ps: PhysicalSpace, psi: np.ndarray, label: str) -> np.ndarray:
    v = as_cvector(psi)
    if not ps.contains(v, Tolerance(1e-7, 1e-7)):
        raise ValueError(f"{label} is not in the physical subspace")
    return v


def schrodinger_reduce(ps: PhysicalSpace, frame_name: str, g, psi_phys) -> np.ndarray:
    """sqrt(Vol_frame) (<phi(g)| x 1) psi_phys; an isometry on the physical space."""
    s = ps.scenario
    frame = s.frame(frame_name)
    v = _require_physical(ps, psi_phys, "state")
    phi = frame.orientation(frame.rep.element(g))
    return np.sqrt(frame.weight_scale) * s.condition_vector(frame_name, phi, v)


def schrodinger_inverse(
    ps: PhysicalSpace,
    frame_name: str,
    g,
    psi_s,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """Map a physical system state back to the perspective-neutral space."""
    s = ps.scenario
    frame = s.frame(frame_name)
    v = as_cvector(psi_s)
    pi = system_projector(s, frame_name, g, tol)
    resid = float(np.linalg.norm(pi @ v - v))
    if resid > 1e4 * tol.weighted(np.linalg.norm(v)):
        raise ValueError(
            f"state lies outside the physical system subspace of frame {frame_name!r} "
            f"(projection residual {resid:.3e})"
        )
    phi = frame.orientation(frame.rep.element(g))
    injected = s.inject_vector(frame_name, phi, v)
    proj = ps.basis.basis
    return np.sqrt(frame.weight_scale) * (proj @ (dagger(proj) @ injected))


def schrodinger_map(
    ps: PhysicalSpace,
    frame_name: str,
    g,
    tol: Tolerance = DEFAULT_TOL,
) -> ReductionMap:
    """Assemble the reduction and its inverse as matrices over the physical basis."""
    s = ps.scenario
    frame = s.frame(frame_name)
    fwd_cols = [schrodinger_reduce(ps, frame_name, g, ps.basis.basis[:, k]) for k in range(ps.dim)]
    fwd = np.column_stack(fwd_cols) if ps.dim else np.zeros((s.complement_dim(frame_name), 0))
    phi = frame.orientation(frame.rep.element(g))
    inj = np.column_stack(
        [s.inject_vector(frame_name, phi, np.eye(s.complement_dim(frame_name))[:, j])
         for j in range(s.complement_dim(frame_name))]
    )
    inv = np.sqrt(frame.weight_scale) * (dagger(ps.basis.basis) @ inj)
    round_trip = inv @ fwd
    if ps.dim and np.linalg.norm(round_trip - np.eye(ps.dim)) > 1e4 * tol.weighted(1.0) * ps.dim:
        raise ValueError("reduction map failed its inverse round-trip validation")
    return ReductionMap(
        kind="schrodinger",
        frame_name=frame_name,
        orientation=frame.rep.element(g),
        matrix=fwd,
        inverse_matrix=inv,
        scale_notes={"frame_volume": frame.weight_scale, "isometry_scale": float(np.sqrt(frame.weight_scale))},
    )


def _check_projector(e: np.ndarray, tol: Tolerance) -> np.ndarray:
    e = as_cmatrix(e)
    if np.linalg.norm(e - dagger(e)) > 1e4 * tol.weighted(1.0) or np.linalg.norm(e @ e - e) > 1e4 * tol.weighted(1.0):
        raise ValueError("expected a Hermitian idempotent projector")
    return e


def conditional_probability(
    ps: PhysicalSpace,
    frame_name: str,
    g,
    projector_e: np.ndarray,
    psi_phys,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """P(E when the frame is in orientation g), cross-checked gauge-invariantly."""
    e = _check_projector(projector_e, tol)
    v = _require_physical(ps, psi_phys, "state")
    v = v / np.linalg.norm(v)
    reduced = schrodinger_reduce(ps, frame_name, g, v)
    p_reduced = float(np.real(np.vdot(reduced, e @ reduced)))
    f = relational_observable(ps.scenario, frame_name, g, e, tol, check=False)
    p_invariant = float(np.real(np.vdot(v, f.matrix @ v)))
    if abs(p_reduced - p_invariant) > 1e5 * tol.weighted(1.0):
        raise ValueError(
            f"gauge-invariance cross-check failed: {p_reduced} vs {p_invariant}"
        )
    return min(max(p_reduced, 0.0), 1.0)


def multi_event_probability(
    ps: PhysicalSpace,
    frame_name: str,
    event: tuple[np.ndarray, object],
    condition: tuple[np.ndarray, object],
    psi_phys,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """P(E at g | E~ at g~) on physical states."""
    e, g = event
    e_cond, g_cond = condition
    e = _check_projector(e, tol)
    e_cond = _check_projector(e_cond, tol)
    v = _require_physical(ps, psi_phys, "state")
    v = v / np.linalg.norm(v)
    s = ps.scenario
    f_e = relational_observable(s, frame_name, g, e, tol, check=False).matrix
    f_c = relational_observable(s, frame_name, g_cond, e_cond, tol, check=False).matrix
    denom = float(np.real(np.vdot(v, f_c @ v)))
    if denom <= 1e4 * tol.weighted(1.0):
        raise ValueError("conditioning event has (numerically) zero probability")
    num = float(np.real(np.vdot(v, f_c @ (f_e @ (f_c @ v)))))
    return num / denom


# ---------------------------------------------------------------------------
# theta states and the Heisenberg picture
# ---------------------------------------------------------------------------


def _u1_charge_data(frame: Frame) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    vals, vecs = np.linalg.eigh(frame.rep.generators[0])
    charges = np.round(vals).astype(int)
    coeff = dagger(vecs) @ frame.seed
    return charges, vecs, coeff


def solve_theta(frame: Frame, tol: Tolerance = DEFAULT_TOL) -> ThetaState | ThetaNotFound:
    """Search for reproducing phases N(g) for the frame's coherent-state kernel.

    Finite groups: fixed-point iteration N <- phase(K N) from N = 1.
    U(1): Fourier ansatz N(theta) = exp(i k theta), scanning k by |k| and sign.
    """
    if frame.rep.is_finite:
        return _solve_theta_finite(frame, tol)
    if frame.group.kind == "U1":
        return _solve_theta_u1(frame, tol)
    return ThetaNotFound(
        reason="no phase search implemented for SU(2) frames; Heisenberg picture unavailable"
    )


def _solve_theta_finite(frame: Frame, tol: Tolerance) -> ThetaState | ThetaNotFound:
    group = frame.rep.group
    orbit = np.einsum("gij,j->gi", frame.rep.matrices, frame.seed)
    gram = np.einsum("gi,hi->gh", np.conj(orbit), orbit)  # <phi(g)|phi(h)>
    w = frame.element_weight()
    n = np.ones(group.order, dtype=complex)
    thresh = 1e3 * tol.weighted(1.0)
    residual = np.inf
    for _ in range(_THETA_MAX_ITER):
        k_n = w * (gram @ n)
        residual = float(np.max(np.abs(k_n - n)))
        if residual <= thresh:
            break
        mags = np.abs(k_n)
        new = np.where(mags > 1e-12, k_n / np.where(mags > 1e-12, mags, 1.0), n)
        if np.max(np.abs(new - n)) <= 1e-15:
            break  # stalled
        n = new
    if residual > thresh:
        return ThetaNotFound(
            reason="fixed-point iteration did not reach a unit-modulus solution",
            residual=residual,
        )
    theta_vec = w * np.einsum("g,gi->i", n, orbit)
    return ThetaState(frame_name=frame.name, vector=theta_vec, phases=n, residual=residual)


def _solve_theta_u1(frame: Frame, tol: Tolerance) -> ThetaState | ThetaNotFound:
    charges, vecs, coeff = _u1_charge_data(frame)
    weights = {}
    for q, c in zip(charges, coeff):
        weights[q] = weights.get(q, 0.0) + abs(c) ** 2
    q_max = int(np.max(np.abs(charges)))
    best_gap = np.inf
    for k in sorted(range(-q_max, q_max + 1), key=lambda k: (abs(k), k < 0)):
        gap = abs(frame.weight_scale * weights.get(-k, 0.0) - 1.0)
        best_gap = min(best_gap, gap)
        if gap <= 1e3 * tol.weighted(1.0):
            mask = charges == -k
            theta_vec = frame.weight_scale * (vecs[:, mask] @ coeff[mask])
            return ThetaState(frame_name=frame.name, vector=theta_vec, fourier_k=k, residual=gap)
    return ThetaNotFound(
        reason="no integer Fourier phase satisfies the reproducing equality",
        residual=float(best_gap),
    )


def reproducing_residual(frame: Frame, theta: ThetaState, count: int = 12) -> float:
    """max_g |<phi(g)|theta> - N(g)| over a deterministic sample of orientations."""
    worst = 0.0
    for g in sample_elements(frame.group, count):
        phi = frame.orientation(g)
        worst = max(worst, abs(complex(np.vdot(phi, theta.vector)) - theta.phase_at(frame, g)))
    return worst


def _u1_complement_charge_projectors(comp_rep) -> list[tuple[int, np.ndarray]]:
    vals, vecs = np.linalg.eigh(comp_rep.generators[0])
    charges = np.round(vals).astype(int)
    out = []
    for q in sorted(set(charges.tolist())):
        cols = vecs[:, charges == q]
        out.append((q, cols @ dagger(cols)))
    return out


def disentangler(
    s: Scenario,
    frame_name: str,
    theta: ThetaState,
    tol: Tolerance = DEFAULT_TOL,
) -> np.ndarray:
    """T_R = sum/int w_g N(g) |phi(g)><phi(g)| x U_S(g)^dag on the kinematical space.

    U(1) frames evaluate the integral exactly through the charge algebra: the
    only surviving terms pair frame-frequency q_i - q_j with system charge
    k + q_i - q_j.
    """
    frame = s.frame(frame_name)
    if theta.frame_name != frame.name:
        raise ValueError("theta state belongs to a different frame")
    comp = s.complement_rep(frame_name)
    if frame.rep.is_finite:
        if theta.phases is None:
            raise ValueError("finite frame needs per-element phases")
        w = frame.element_weight()
        total = np.zeros((s.kin_dim, s.kin_dim), dtype=complex)
        for g in frame.rep.group.elements():
            phi = frame.rep.matrices[g] @ frame.seed
            u_s = comp.matrices[g]
            total += w * theta.phases[g] * s.embed_frame_operator(
                frame_name, np.outer(phi, np.conj(phi)), dagger(u_s)
            )
        return total
    if frame.group.kind != "U1":
        raise ValueError("disentangler supports finite-group and U(1) frames")
    if theta.fourier_k is None:
        raise ValueError("U(1) frame needs a Fourier phase label")
    charges, vecs, coeff = _u1_charge_data(frame)
    projectors = dict(_u1_complement_charge_projectors(comp))
    total = np.zeros((s.kin_dim, s.kin_dim), dtype=complex)
    k = theta.fourier_k
    for i, qi in enumerate(charges):
        for j, qj in enumerate(charges):
            sq = k + qi - qj
            if sq not in projectors:
                continue
            frame_part = (coeff[i] * np.conj(coeff[j])) * np.outer(vecs[:, i], np.conj(vecs[:, j]))
            total += frame.weight_scale * s.embed_frame_operator(frame_name, frame_part, projectors[sq])
    return total


def heisenberg_reduce(
    ps: PhysicalSpace,
    frame_name: str,
    theta: ThetaState,
    psi_phys,
    tol: Tolerance = DEFAULT_TOL,
    orientation_samples: int = 8,
) -> np.ndarray:
    """Disentangle, then condition on an arbitrary orientation (verified g-independent)."""
    s = ps.scenario
    frame = s.frame(frame_name)
    v = _require_physical(ps, psi_phys, "state")
    t_r = disentangler(s, frame_name, theta, tol)
    tv = t_r @ v
    scale = np.sqrt(frame.weight_scale)
    candidates = []
    for g in sample_elements(frame.group, orientation_samples):
        phi = frame.orientation(g)
        candidates.append(
            scale * np.conj(theta.phase_at(frame, g)) * s.condition_vector(frame_name, phi, tv)
        )
    worst = max(
        float(np.linalg.norm(c - candidates[0])) for c in candidates[1:]
    ) if len(candidates) > 1 else 0.0
    if worst > 1e5 * tol.weighted(1.0):
        raise ValueError(
            f"Heisenberg reduction depends on the conditioning orientation ({worst:.3e}); "
            "theta state is not reproducing for this frame"
        )
    identity = frame.rep.identity_element()
    phi_e = frame.orientation(identity)
    return scale * np.conj(theta.phase_at(frame, identity)) * s.condition_vector(frame_name, phi_e, tv)

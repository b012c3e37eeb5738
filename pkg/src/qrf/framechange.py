"""Frame transformations.

Gauge-induced coordinate changes route one frame's conditional description
through the perspective-neutral space into another frame's, and are
isometries between the (possibly moving) physical system subspaces
regardless of frame idealness.  Symmetry-induced transformations -- plain
and relation-conditional reorientations -- act on relational observables
instead; the relation-conditional construction is restricted to regular
representations, as is its commuting-subalgebra structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import frames as frames_mod
from .linalg import DEFAULT_TOL, Tolerance, dagger, orthonormal_range
from .perspective import (
    PhysicalSpace,
    RelObs,
    Scenario,
    physical_space,
    relational_observable,
    system_projector,
)
from .reductions import schrodinger_map

__all__ = [
    "FrameChange",
    "ReorientationMap",
    "frame_change",
    "ensure_lr",
    "reorient",
    "relation_conditional_reorient",
    "tautological_relobs",
    "restricted_unit_family",
    "subsystem_relativity_report",
]


@dataclass
class FrameChange:
    """Map between two frames' physical system subspaces (through H_phys)."""

    from_frame: str
    to_frame: str
    g_from: object
    g_to: object
    matrix: np.ndarray  # (complement_dim(to), complement_dim(from))
    scale_notes: dict


@dataclass
class ReorientationMap:
    frame_name: str
    kind: str  # "plain" | "relation_conditional"
    parameters: dict = field(default_factory=dict)


def frame_change(
    ps: PhysicalSpace,
    frame_i: str,
    g_i,
    frame_j: str,
    g_j,
    tol: Tolerance = DEFAULT_TOL,
) -> FrameChange:
    """V_{Ri->Rj}(g_i, g_j), verified isometric between the projector ranges."""
    s = ps.scenario
    fi = s.frame(frame_i)
    fj = s.frame(frame_j)
    if frame_i == frame_j:
        # same-frame orientation change: reduce(g_j) after un-reducing from g_i
        mi = schrodinger_map(ps, frame_i, g_i, tol)
        mj = schrodinger_map(ps, frame_j, g_j, tol)
        mat = mj.matrix @ mi.inverse_matrix
        scale = {"from_volume": fi.weight_scale, "to_volume": fj.weight_scale, "same_frame": True}
        return FrameChange(frame_i, frame_j, fi.rep.element(g_i), fj.rep.element(g_j), mat, scale)
    if ps.dim == 0:
        raise ValueError("cannot change frames with an empty physical space")
    phi_i = fi.orientation(fi.rep.element(g_i))
    phi_j = fj.orientation(fj.rep.element(g_j))
    proj = ps.basis.basis
    # sqrt(Vol_i Vol_j) <phi_j| P_phys |phi_i> as a map between complements
    scale = float(np.sqrt(fi.weight_scale * fj.weight_scale))
    cond_j = np.column_stack(
        [s.condition_vector(frame_j, phi_j, proj[:, k]) for k in range(ps.dim)]
    )
    inj_i = np.column_stack(
        [
            dagger(proj) @ s.inject_vector(frame_i, phi_i, e)
            for e in np.eye(s.complement_dim(frame_i), dtype=complex).T
        ]
    )
    mat = scale * (cond_j @ inj_i)
    pi_dom = system_projector(s, frame_i, g_i, tol)
    pi_cod = system_projector(s, frame_j, g_j, tol)
    worst = max(
        float(np.linalg.norm(dagger(mat) @ mat - pi_dom)),
        float(np.linalg.norm(mat @ dagger(mat) - pi_cod)),
    )
    if worst > 1e5 * tol.weighted(1.0) * max(1, mat.shape[0]):
        raise ValueError(f"frame change failed the isometry check ({worst:.3e})")
    return FrameChange(
        frame_i,
        frame_j,
        fi.rep.element(g_i),
        fj.rep.element(g_j),
        mat,
        {"from_volume": fi.weight_scale, "to_volume": fj.weight_scale, "isometry_defect": worst},
    )


def ensure_lr(frame, tol: Tolerance = DEFAULT_TOL):
    """Populate and return the frame's right action, or raise if none exists."""
    if frame.lr is None and not frame.lr_report.get("checked"):
        v_rep, report = frames_mod.lr_classify(frame, tol)
        report["checked"] = True
        frame.lr = v_rep
        frame.lr_report = report
    if frame.lr is None:
        raise ValueError(
            f"frame {frame.name!r} admits no right action, so no symmetries: "
            + frame.lr_report.get("reason", "")
        )
    return frame.lr


def reorient(s: Scenario, frame_name: str, g, obs: RelObs, tol: Tolerance = DEFAULT_TOL) -> RelObs:
    """Frame reorientation by g: conjugation with V_R(g) x 1, shifting the orbit label."""
    frame = s.frame(frame_name)
    if obs.frame_name != frame_name:
        raise ValueError("observable was built relative to another frame")
    v_rep = ensure_lr(frame, tol)
    el = frame.rep.element(g)
    v_full = s.embed_frame_operator(
        frame_name, v_rep.evaluate(el), np.eye(s.complement_dim(frame_name))
    )
    from . import groups

    new_orientation = groups.compose(obs.orientation, groups.inverse(el))
    return RelObs(
        matrix=v_full @ obs.matrix @ dagger(v_full),
        frame_name=frame_name,
        orientation=new_orientation,
        source=obs.source,
        scenario=s,
    )


def _require_ideal(frame, tol: Tolerance) -> np.ndarray:
    """Orbit states of an ideal (regular-representation) frame, as columns."""
    if not frame.rep.is_finite:
        raise ValueError("relation-conditional reorientations need finite regular frames")
    group = frame.rep.group
    if frame.dim != group.order:
        raise ValueError(f"frame {frame.name!r} is not a regular-representation frame")
    orbit = np.column_stack([frame.rep.matrices[g] @ frame.seed for g in group.elements()])
    gram = dagger(orbit) @ orbit
    if np.linalg.norm(gram - np.eye(group.order)) > 1e4 * tol.weighted(1.0) * group.order:
        raise ValueError(f"frame {frame.name!r} orientation states are not orthonormal")
    return orbit


def tautological_relobs(s: Scenario, frame_name: str, g, values) -> RelObs:
    """F_{Q,R}(g) = Q(g) 1 for a frame-configuration observable Q = sum Q(g)|g><g|."""
    frame = s.frame(frame_name)
    vals = np.asarray(values, dtype=complex).reshape(-1)
    if not frame.rep.is_finite or vals.size != frame.rep.group.order:
        raise ValueError("need one value per group element of a finite frame")
    el = frame.rep.element(g)
    return RelObs(
        matrix=complex(vals[el.index]) * np.eye(s.kin_dim, dtype=complex),
        frame_name=frame_name,
        orientation=el,
        source=np.diag(vals),
        scenario=s,
        family=lambda h: complex(vals[frame.rep.element(h).index]) * np.eye(s.kin_dim, dtype=complex),
    )


def _kron_slots(dims: list[int], ops: dict[int, np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for i, d in enumerate(dims):
        out = np.kron(out, ops.get(i, np.eye(d, dtype=complex)))
    return out


def relation_conditional_reorient(
    s: Scenario,
    frame1: str,
    g1,
    frame2: str,
    g2,
    obs: RelObs,
    modified: bool = True,
    tol: Tolerance = DEFAULT_TOL,
) -> RelObs:
    """Reorient frame 1 conditionally on its relation to frame 2.

    The default (modified) form applies the relation-conditional orientation
    relabeling to the whole relational-observable family, which maps every
    relational observable relative to frame 1 -- tautological ones included --
    to its counterpart relative to frame 2.  ``modified=False`` uses the
    unital conjugation form instead, which fixes tautological observables.
    """
    if frame1 == frame2:
        raise ValueError("relation-conditional reorientation needs two distinct frames")
    f1 = s.frame(frame1)
    f2 = s.frame(frame2)
    orbit1 = _require_ideal(f1, tol)
    orbit2 = _require_ideal(f2, tol)
    if obs.frame_name != frame1:
        raise ValueError("operand must be a relational observable relative to the first frame")
    group = f1.rep.group
    slot1 = s.frame_slot(frame1)
    slot2 = s.frame_slot(frame2)
    g1_el = f1.rep.element(g1)
    g2_el = f2.rep.element(g2)
    if modified:
        family: Callable = obs.family or (
            lambda h: relational_observable(s, frame1, h, obs.source, tol, check=False).matrix
        )
    else:
        v_rep = ensure_lr(f1, tol)
    out = np.zeros((s.kin_dim, s.kin_dim), dtype=complex)
    base = obs.matrix
    for gp in group.elements():
        # projector onto relative orientation g2 g'^-1: sum_g |g>1<g| x |g g'>2<g g'|
        q = np.zeros((s.kin_dim, s.kin_dim), dtype=complex)
        for g in group.elements():
            p1 = np.outer(orbit1[:, g], np.conj(orbit1[:, g]))
            gg = group.mult(g, gp)
            p2 = np.outer(orbit2[:, gg], np.conj(orbit2[:, gg]))
            q += _kron_slots(s.dims, {slot1: p1, slot2: p2})
        if modified:
            label = group.mult(g2_el.index, group.inverse(gp))
            out += q @ family(f1.rep.element(label))
        else:
            k = group.mult(gp, group.mult(group.inverse(g2_el.index), g1_el.index))
            v_full = s.embed_frame_operator(frame1, v_rep.matrices[k], np.eye(s.complement_dim(frame1)))
            out += q @ (v_full @ base @ dagger(v_full))
    return RelObs(matrix=out, frame_name=frame2, orientation=g2_el, source=obs.source, scenario=s)


# ---------------------------------------------------------------------------
# subsystem relativity diagnostics
# ---------------------------------------------------------------------------


def _matrix_units(d: int) -> list[np.ndarray]:
    units = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = 1.0
            units.append(e)
    return units


def _generate_algebra(mats: list[np.ndarray], tol: Tolerance, max_rounds: int = 8) -> np.ndarray:
    """Orthonormal basis of the unital algebra span (vectorized operators).

    Grows the span only by products that fall measurably outside it, so
    already-closed spans cost one residual sweep instead of a giant SVD.
    """
    d = mats[0].shape[0]
    seeds = [np.eye(d, dtype=complex)] + mats
    basis = orthonormal_range(np.column_stack([m.reshape(-1) for m in seeds]), tol).basis
    for _ in range(max_rounds):
        ops = basis.T.reshape(-1, d, d)
        prods = np.einsum("aij,bjk->abik", ops, ops, optimize=True).reshape(-1, d * d).T
        resid = prods - basis @ (dagger(basis) @ prods)
        norms = np.linalg.norm(resid, axis=0)
        fresh = resid[:, norms > 1e3 * tol.weighted(1.0)]
        if fresh.shape[1] == 0:
            return basis
        basis = orthonormal_range(np.hstack([basis, fresh]), tol).basis
    return basis


def _span_overlap_dim(b1: np.ndarray, b2: np.ndarray, tol: Tolerance) -> int:
    union = orthonormal_range(np.hstack([b1, b2]), tol).dim
    return b1.shape[1] + b2.shape[1] - union


def restricted_unit_family(
    s: Scenario,
    ps: PhysicalSpace,
    frame_name: str,
    target_slot: int,
    tol: Tolerance = DEFAULT_TOL,
) -> list[np.ndarray]:
    """F_{f,frame}(e) restricted to the physical basis, f = target-slot matrix units.

    Finite frames route the conditional twirl through W_g = B^dag U(g)(|phi> x 1)
    so one batched contraction covers every matrix unit at once; Lie frames fall
    back to per-unit twirls.
    """
    dims = s.dims
    frame = s.frame(frame_name)
    slot_f = s.frame_slot(frame_name)
    rest = [i for i in range(len(dims)) if i != slot_f]
    if target_slot == slot_f:
        raise ValueError("target subsystem coincides with the frame")
    t_pos = rest.index(target_slot)
    d_t = dims[target_slot]
    comp_dim = s.complement_dim(frame_name)
    if not frame.rep.is_finite:
        out = []
        for unit in _matrix_units(d_t):
            ops = {target_slot: unit}
            comp_op = np.ones((1, 1), dtype=complex)
            for i in rest:
                comp_op = np.kron(comp_op, ops.get(i, np.eye(dims[i], dtype=complex)))
            f = relational_observable(
                s, frame_name, frame.rep.identity_element(), comp_op, tol, check=False
            )
            out.append(ps.restrict(f.matrix))
        return out
    inj = np.column_stack(
        [s.inject_vector(frame_name, frame.seed, e) for e in np.eye(comp_dim, dtype=complex).T]
    )
    w = np.stack(
        [dagger(ps.basis.basis) @ (s.total_rep.matrices[g] @ inj)
         for g in frame.rep.group.elements()]
    )  # (|G|, n_phys, comp_dim)
    rest_dims = [dims[i] for i in rest]
    w = w.reshape([w.shape[0], ps.dim] + rest_dims)
    w = np.moveaxis(w, 2 + t_pos, 2)  # (|G|, n_phys, d_t, d_rest...)
    w = w.reshape(w.shape[0], ps.dim, d_t, -1)
    weight = frame.weight_scale / frame.rep.group.order
    fam = weight * np.einsum("gpir,gqjr->ijpq", w, np.conj(w), optimize=True)
    return [fam[i, j] for i in range(d_t) for j in range(d_t)]


def subsystem_relativity_report(
    s: Scenario,
    frame1: str,
    frame2: str,
    tol: Tolerance = DEFAULT_TOL,
) -> dict:
    """Compare the relational-observable subalgebras defined by two frames.

    Restricted to the physical basis, reports (a) whether frame-2 and system
    observables relativized to frame 1 commute, (b) whether the two system
    subalgebras coincide, and (c) their overlap dimension.
    """
    ps = physical_space(s, tol)
    if ps.dim == 0:
        raise ValueError("empty physical space")
    if frame1 == frame2:
        return {
            "degenerate": True,
            "coincide": True,
            "note": "both arguments name the same frame; subalgebras trivially coincide",
        }
    slot1 = s.frame_slot(frame1)
    slot2 = s.frame_slot(frame2)
    dims = s.dims

    def restricted_family(frame_name: str, target_slot: int) -> list[np.ndarray]:
        return restricted_unit_family(s, ps, frame_name, target_slot, tol)

    sys_slots = [i for i in range(len(dims)) if i not in (slot1, slot2)]
    if not sys_slots:
        raise ValueError("need a system subsystem besides the two frames")
    report: dict = {"degenerate": False, "frame1": frame1, "frame2": frame2}
    sys_slot = sys_slots[0]
    a_s_r1 = restricted_family(frame1, sys_slot)
    a_s_r2 = restricted_family(frame2, sys_slot)
    a_r2_r1 = restricted_family(frame1, slot2)
    # (a) commutation of the frame-2 and system observables relative to frame 1
    comm = max(
        float(np.linalg.norm(x @ y - y @ x)) for x in a_r2_r1 for y in a_s_r1
    )
    report["relativized_commutant_residual"] = comm
    report["commuting_pass"] = comm <= 1e5 * tol.weighted(1.0)
    # (b), (c) distinctness of the two relativizations of the system algebra
    alg1 = _generate_algebra(a_s_r1, tol)
    alg2 = _generate_algebra(a_s_r2, tol)
    overlap = _span_overlap_dim(alg1, alg2, tol)
    report["algebra_dims"] = (int(alg1.shape[1]), int(alg2.shape[1]))
    report["overlap_dim"] = int(overlap)
    report["coincide"] = overlap == alg1.shape[1] == alg2.shape[1]
    return report

"""Coherent-state reference frames.

A frame is a unitary representation plus a seed state whose orbit resolves
the identity under the frame's own Haar normalization: the measure is scaled
so the resolution constant is 1, which makes the total group volume equal
dim(H_R) for a normalized seed (per-element weight dim/|G| for finite
groups).  Validation is a direct weighted sum for finite groups and the
isotypic Schmidt-uniformity criterion for U(1)/SU(2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import reps
from .groups import Subgroup
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    as_cvector,
    dagger,
    fix_phase,
    nullspace,
)
from .reps import UnitaryRep, isotypic_decompose

__all__ = [
    "Frame",
    "PovmEffect",
    "ResolutionFails",
    "make_frame",
    "orientation_state",
    "isotropy_group",
    "povm_effect",
    "lr_classify",
    "build_lr_seed",
]


class ResolutionFails(ValueError):
    """Seed orbit does not resolve the identity; carries the block diagnosis."""

    def __init__(self, message: str, block_report: list[dict] | None = None):
        super().__init__(message)
        self.block_report = block_report or []


@dataclass(eq=False)
class Frame:
    """A validated coherent-state frame; treat as immutable."""

    name: str
    rep: UnitaryRep
    seed: np.ndarray
    weight_scale: float  # Vol(G) under this frame's measure = dim(H_R)
    isotropy: Subgroup
    lr: UnitaryRep | None = None
    lr_report: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.rep.dim

    @property
    def group(self):
        return self.rep.group

    def element_weight(self) -> float:
        """Per-element measure weight for finite groups (dim/|G|)."""
        if not self.rep.is_finite:
            raise ValueError("per-element weights only exist for finite groups")
        return self.weight_scale / self.rep.group.order

    def orientation(self, g) -> np.ndarray:
        return orientation_state(self, g)


@dataclass(frozen=True)
class PovmEffect:
    subset: tuple[int, ...]
    matrix: np.ndarray


def _finite_resolution_defect(rep: UnitaryRep, seed: np.ndarray) -> float:
    w = rep.dim / rep.group.order
    orbit = np.einsum("gij,j->gi", rep.matrices, seed)
    total = w * np.einsum("gi,gj->ij", orbit, np.conj(orbit))
    return float(np.linalg.norm(total - np.eye(rep.dim)))


def _lie_block_report(rep: UnitaryRep, seed: np.ndarray, tol: Tolerance) -> list[dict]:
    """Per-isotypic-block resolution diagnosis (multiplicity bound and Schmidt
    uniformity of the seed across each block)."""
    deco = isotypic_decompose(rep, tol)
    report = []
    for block in deco.blocks:
        d, m = block.irrep_dim, block.multiplicity
        coeff = np.einsum("iam,i->am", np.conj(block.grid), seed)  # (d, m)
        gram = dagger(coeff) @ coeff
        target = (d / rep.dim) * np.eye(m)
        deviation = float(np.linalg.norm(gram - target))
        report.append(
            {
                "label": block.label,
                "irrep_dim": d,
                "multiplicity": m,
                "multiplicity_ok": m <= d,
                "schmidt_deviation": deviation,
                "schmidt_ok": deviation <= 1e3 * tol.weighted(1.0),
            }
        )
    return report


def make_frame(
    rep: UnitaryRep,
    seed,
    name: str = "R",
    tol: Tolerance = DEFAULT_TOL,
) -> Frame:
    """Validate (rep, seed) as a coherent-state frame and attach its measure.

    Finite groups: direct weighted-sum resolution check.  U(1)/SU(2): every
    isotypic block must satisfy multiplicity <= irrep dim and the seed must be
    Schmidt-uniform across it.
    """
    vec = as_cvector(seed)
    if vec.size != rep.dim:
        raise ValueError("seed dimension does not match the representation")
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > 1e3 * tol.weighted(1.0):
        raise ValueError(f"seed must be normalized, got norm {nrm}")
    vec = fix_phase(vec / nrm, tol)
    if rep.is_finite:
        defect = _finite_resolution_defect(rep, vec)
        if defect > 1e-8 * rep.dim:
            raise ResolutionFails(
                f"frame {name!r}: coherent-state sum deviates from identity by {defect:.3e}"
            )
    else:
        report = _lie_block_report(rep, vec, tol)
        bad = [r for r in report if not (r["multiplicity_ok"] and r["schmidt_ok"])]
        if bad:
            worst = bad[0]
            if not worst["multiplicity_ok"]:
                msg = (
                    f"frame {name!r}: block {worst['label']} has irrep dim "
                    f"{worst['irrep_dim']} < multiplicity {worst['multiplicity']}"
                )
            else:
                msg = (
                    f"frame {name!r}: seed is not Schmidt-uniform on block "
                    f"{worst['label']} (deviation {worst['schmidt_deviation']:.3e})"
                )
            raise ResolutionFails(msg, report)
    frame = Frame(
        name=name,
        rep=rep,
        seed=vec,
        weight_scale=float(rep.dim),
        isotropy=Subgroup(parent=rep.group),
    )
    frame.isotropy = isotropy_group(frame, tol)
    return frame


def orientation_state(f: Frame, g) -> np.ndarray:
    """|phi(g)> = U_R(g) |phi(e)>."""
    return f.rep.evaluate(g) @ f.seed


def isotropy_group(f: Frame, tol: Tolerance = DEFAULT_TOL) -> Subgroup:
    """Elements (finite) or algebra directions (Lie) stabilizing the seed ray.

    Lie isotropy is reported at the algebra level only; any discrete stabilizer
    component is flagged unknown.
    """
    seed_proj = np.outer(f.seed, np.conj(f.seed))
    if f.rep.is_finite:
        members = []
        for g in f.rep.group.elements():
            v = f.rep.matrices[g] @ f.seed
            if np.linalg.norm(np.outer(v, np.conj(v)) - seed_proj) <= 1e-8:
                members.append(g)
        return Subgroup(parent=f.rep.group, element_indices=tuple(members))
    # kernel of c -> (1 - |phi><phi|) (sum_a c_a K_a) |phi>, over real coefficients
    comp = np.eye(f.dim) - seed_proj
    cols = [comp @ (k @ f.seed) for k in f.rep.generators]
    m = np.column_stack(cols)
    real_stack = np.vstack([m.real, m.imag])
    ker = nullspace(real_stack.astype(complex), tol)
    directions = tuple(tuple(float(x) for x in np.real(ker[:, j])) for j in range(ker.shape[1]))
    return Subgroup(parent=f.rep.group, algebra_basis=directions, discrete_part_unknown=True)


def povm_effect(f: Frame, subset) -> PovmEffect:
    """Covariant POVM effect E_Y = sum_{g in Y} w_g |phi(g)><phi(g)| (finite only)."""
    if not f.rep.is_finite:
        raise ValueError("POVM effects over subsets are defined for finite-group frames")
    order = f.rep.group.order
    members = tuple(sorted(int(g) for g in subset))
    if members and (members[0] < 0 or members[-1] >= order):
        raise ValueError("subset contains indices outside the group")
    w = f.element_weight()
    e = np.zeros((f.dim, f.dim), dtype=complex)
    for g in members:
        v = f.rep.matrices[g] @ f.seed
        e += w * np.outer(v, np.conj(v))
    return PovmEffect(subset=members, matrix=e)


# ---------------------------------------------------------------------------
# left-right (LR) structure
# ---------------------------------------------------------------------------


def _block_seed_matrix(block, seed: np.ndarray) -> np.ndarray:
    return np.einsum("iam,i->am", np.conj(block.grid), seed)  # (d, m)


def _restricted_irrep(block, rep: UnitaryRep, g) -> np.ndarray:
    ref = block.grid[:, :, 0]
    return dagger(ref) @ rep.evaluate(g) @ ref


def lr_classify(f: Frame, tol: Tolerance = DEFAULT_TOL) -> tuple[UnitaryRep | None, dict]:
    """Decide whether the frame admits a commuting right action V_R.

    Exists iff every isotypic block has multiplicity equal to its irrep
    dimension and the seed is block-wise maximally entangled in the aligned
    grid basis; the returned V_R acts by right translation on the orbit.
    """
    deco = isotypic_decompose(f.rep, tol)
    report: dict = {"blocks": [], "lr_exists": True, "reason": ""}
    pieces = []
    for block in deco.blocks:
        d, m = block.irrep_dim, block.multiplicity
        entry = {"label": block.label, "irrep_dim": d, "multiplicity": m}
        if m != d:
            report["lr_exists"] = False
            report["reason"] = (
                f"block {block.label}: multiplicity {m} != irrep dim {d}, "
                "cannot split as irrep x conjugate-irrep"
            )
            report["blocks"].append(entry)
            continue
        s = _block_seed_matrix(block, f.seed)  # (d, d)
        target = abs(np.trace(dagger(s) @ s)) / d
        dev = float(np.linalg.norm(dagger(s) @ s - target * np.eye(d)))
        entry["max_entangled_deviation"] = dev
        if dev > 1e3 * tol.weighted(1.0):
            report["lr_exists"] = False
            report["reason"] = f"block {block.label}: seed is not maximally entangled (dev {dev:.3e})"
        report["blocks"].append(entry)
        pieces.append((block, s))
    if not report["lr_exists"]:
        return None, report
    v_rep = _build_right_action(f, deco, pieces, tol)
    return v_rep, report


def _lift_right_multiplier(block, r: np.ndarray) -> np.ndarray:
    """Operator form of coefficient-matrix right multiplication M -> M r."""
    return np.einsum("mn,ian,jam->ij", r, block.grid, np.conj(block.grid), optimize=True)


def _right_matrix(f: Frame, pieces, g) -> np.ndarray:
    """V_R(g) = sum_blocks right-translation action in the aligned grid basis."""
    out = np.zeros((f.dim, f.dim), dtype=complex)
    for block, s in pieces:
        rho = _restricted_irrep(block, f.rep, g)
        r = np.linalg.solve(s, dagger(rho) @ s)  # S^-1 rho(g)^dag S
        out += _lift_right_multiplier(block, r)
    return out


def _build_right_action(f: Frame, deco, pieces, tol: Tolerance) -> UnitaryRep:
    group = f.rep.group
    if f.rep.is_finite:
        mats = np.stack([_right_matrix(f, pieces, g) for g in group.elements()])
        return reps.finite_rep(group, mats, tol)
    # Lie case: right-action generators -S^-1 K S per block along the m-axis
    gens = np.zeros((group.algebra_dim, f.dim, f.dim), dtype=complex)
    for a in range(group.algebra_dim):
        for block, s in pieces:
            ref = block.grid[:, :, 0]
            k = dagger(ref) @ f.rep.generators[a] @ ref
            r = -np.linalg.solve(s, k @ s)
            gens[a] += _lift_right_multiplier(block, (r + dagger(r)) / 2.0)
    return reps.lie_rep(group, gens, tol)


def build_lr_seed(deco: reps.IsotypicDecomposition, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Seed with Schmidt-uniform block entanglement and weights sqrt(d_q^2/dim).

    Requires multiplicity <= irrep dim on every block; the resulting orbit
    resolves the identity by construction.
    """
    dim = deco.ambient_dim
    seed = np.zeros(dim, dtype=complex)
    for block in deco.blocks:
        d, m = block.irrep_dim, block.multiplicity
        if m > d:
            raise ResolutionFails(
                f"block {block.label}: irrep dim {d} < multiplicity {m}, no admissible seed"
            )
        amp = np.sqrt(d / dim)
        for k in range(m):
            seed += amp * block.grid[:, k, k]
    return fix_phase(seed / np.linalg.norm(seed), tol)

"""Perspective-neutral layer: physical Hilbert space and relational observables.

All in-scope groups are compact, so gauge-invariant states form a genuine
subspace of the kinematical space and the physical inner product is the
kinematical one on an orthonormal basis of that subspace.  The measure
bookkeeping of the per-frame Haar normalization then shows up as explicit
scale constants: twirls over frame orientations carry the frame's volume
(weight_scale), conditionings carry its square root.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import groups, reps
from .frames import Frame
from .groups import FiniteGroup, LieDescriptor, Subgroup
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    Tolerance,
    as_cmatrix,
    as_cvector,
    dagger,
    orthonormal_range,
)
from .reps import UnitaryRep, group_average, tensor

__all__ = [
    "Scenario",
    "PhysicalSpace",
    "RelObs",
    "make_scenario",
    "physical_space",
    "relational_observable",
    "h_average",
    "system_projector",
    "orientation_independent",
    "physical_system_span",
    "check_weak_homomorphism",
    "conditional_inner_product_check",
    "sample_elements",
    "strong_dirac_defect",
]


@dataclass
class Scenario:
    """A gauge group acting on an ordered list of subsystems, with named frames."""

    group: FiniteGroup | LieDescriptor
    subsystems: tuple[tuple[str, UnitaryRep], ...]
    frames: dict[str, tuple[int, Frame]]  # name -> (subsystem slot, frame)
    total_rep: UnitaryRep
    kin_dim: int
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> list[int]:
        return [rep.dim for _, rep in self.subsystems]

    def frame(self, name: str) -> Frame:
        return self.frames[name][1]

    def frame_slot(self, name: str) -> int:
        return self.frames[name][0]

    def complement_rep(self, frame_name: str) -> UnitaryRep:
        """Tensor representation on everything except the frame's subsystem."""
        key = ("comp", frame_name)
        if key not in self._cache:
            slot = self.frame_slot(frame_name)
            rest = [rep for i, (_, rep) in enumerate(self.subsystems) if i != slot]
            self._cache[key] = tensor(rest) if rest else reps.trivial_rep(self.group)
        return self._cache[key]

    def complement_dim(self, frame_name: str) -> int:
        return self.kin_dim // self.subsystems[self.frame_slot(frame_name)][1].dim

    def embed_frame_operator(self, frame_name: str, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Operator acting as ``a`` on the frame slot and ``b`` on the complement."""
        return _embed_pair(self.dims, self.frame_slot(frame_name), a, b)

    def condition_vector(self, frame_name: str, phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """(<phi|_frame x 1) psi, keeping the complement in subsystem order."""
        slot = self.frame_slot(frame_name)
        t = np.asarray(psi, dtype=complex).reshape(self.dims)
        return np.tensordot(t, np.conj(phi), axes=([slot], [0])).reshape(-1)

    def inject_vector(self, frame_name: str, phi: np.ndarray, chi: np.ndarray) -> np.ndarray:
        """(|phi>_frame x 1) chi: tensor a frame vector with a complement vector."""
        slot = self.frame_slot(frame_name)
        rest_dims = [d for i, d in enumerate(self.dims) if i != slot]
        t = np.asarray(chi, dtype=complex).reshape(rest_dims)
        full = np.tensordot(np.asarray(phi, dtype=complex), t, axes=0)  # frame axis first
        order = _slot_first_order(len(self.dims), slot)
        return np.transpose(full, np.argsort(order)).reshape(-1)


def _slot_first_order(n: int, slot: int) -> list[int]:
    return [slot] + [i for i in range(n) if i != slot]


def _embed_pair(dims: list[int], slot: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    order = _slot_first_order(len(dims), slot)
    perm_dims = [dims[i] for i in order]
    full = np.kron(a, b).reshape(perm_dims + perm_dims)
    inv = list(np.argsort(order))
    axes = inv + [len(dims) + i for i in inv]
    total = int(np.prod(dims))
    return np.transpose(full, axes).reshape(total, total)


def make_scenario(
    group,
    subsystems: list[tuple[str, UnitaryRep]],
    frames: dict[str, tuple[str, Frame]] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> Scenario:
    """Assemble and validate a scenario (shared group, frames on real subsystems)."""
    names = [n for n, _ in subsystems]
    if len(set(names)) != len(names):
        raise ValueError("subsystem names must be unique")
    for n, rep in subsystems:
        same = rep.group is group or (
            not rep.is_finite and isinstance(group, LieDescriptor) and rep.group.kind == group.kind
        )
        if not same:
            raise ValueError(f"subsystem {n!r} does not carry the scenario group")
    frame_map: dict[str, tuple[int, Frame]] = {}
    for fname, (sub_name, frame) in (frames or {}).items():
        if sub_name not in names:
            raise ValueError(f"frame {fname!r} references unknown subsystem {sub_name!r}")
        slot = names.index(sub_name)
        if frame.rep.dim != subsystems[slot][1].dim:
            raise ValueError(f"frame {fname!r} dimension does not match subsystem {sub_name!r}")
        frame_map[fname] = (slot, frame)
    total = tensor([rep for _, rep in subsystems])
    return Scenario(
        group=group,
        subsystems=tuple(subsystems),
        frames=frame_map,
        total_rep=total,
        kin_dim=total.dim,
    )


@dataclass
class PhysicalSpace:
    """Orthonormal basis of the gauge-invariant subspace of the kinematical space."""

    scenario: Scenario
    basis: Subspace

    @property
    def dim(self) -> int:
        return self.basis.dim

    def projector(self) -> np.ndarray:
        return self.basis.projector()

    def contains(self, v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.basis.contains(v, tol)

    def restrict(self, op: np.ndarray) -> np.ndarray:
        """Matrix of an operator in the physical basis."""
        b = self.basis.basis
        return dagger(b) @ as_cmatrix(op) @ b


@dataclass
class RelObs:
    """Relational Dirac observable: frame-orientation-conditional twirl of f_S."""

    matrix: np.ndarray
    frame_name: str
    orientation: object
    source: np.ndarray
    scenario: Scenario
    family: object = None  # optional orientation -> matrix evaluator


def physical_space(s: Scenario, tol: Tolerance = DEFAULT_TOL) -> PhysicalSpace:
    key = ("phys", tol.abs_tol)
    if key not in s._cache:
        s._cache[key] = PhysicalSpace(s, reps.fixed_subspace(s.total_rep, tol))
    return s._cache[key]


def gauge_checks(s: Scenario) -> list[np.ndarray]:
    """Operators whose commutant defines gauge invariance (elements or generators)."""
    if s.total_rep.is_finite:
        return list(s.total_rep.matrices)
    return list(s.total_rep.generators)


def strong_dirac_defect(s: Scenario, op: np.ndarray) -> float:
    worst = 0.0
    for u in gauge_checks(s):
        worst = max(worst, float(np.linalg.norm(u @ op - op @ u)))
    return worst


def relational_observable(
    s: Scenario,
    frame_name: str,
    g,
    f_s: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
    check: bool = True,
) -> RelObs:
    """F_{f_S,R}(g): twirl of |phi(g)><phi(g)| x f_S under the frame's measure."""
    frame = s.frame(frame_name)
    f_s = as_cmatrix(f_s)
    comp_dim = s.complement_dim(frame_name)
    if f_s.shape != (comp_dim, comp_dim):
        raise ValueError(
            f"system observable must act on the {comp_dim}-dim complement of frame {frame_name!r}"
        )
    phi = frame.orientation(frame.rep.element(g))
    aligned = s.embed_frame_operator(frame_name, np.outer(phi, np.conj(phi)), f_s)
    mat = group_average(s.total_rep, aligned, mode="twirl", measure_scale=frame.weight_scale, tol=tol)
    obs = RelObs(matrix=mat, frame_name=frame_name, orientation=frame.rep.element(g), source=f_s, scenario=s)
    if check:
        defect = strong_dirac_defect(s, mat)
        scale = max(1.0, float(np.abs(mat).max()))
        if defect > 1e5 * tol.weighted(scale):
            raise ValueError(f"relational observable failed the Dirac commutation check ({defect:.2e})")
    return obs


def h_average(f_s: np.ndarray, h: Subgroup, rep_s: UnitaryRep, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Average of a system observable over the frame's isotropy group.

    Finite subgroups average directly; a one-dimensional isotropy algebra keeps
    the eigenvalue-block-diagonal part of f_S with respect to its generator; the
    full su(2) algebra falls back to the system twirl.
    """
    f_s = as_cmatrix(f_s)
    if h.element_indices is not None:
        if rep_s.dim != f_s.shape[0]:
            raise ValueError("observable does not act on the system representation")
        out = np.zeros_like(f_s)
        for idx in h.element_indices:
            u = rep_s.matrices[idx]
            out += u @ f_s @ dagger(u)
        return out / len(h.element_indices)
    basis = h.algebra_basis or ()
    if len(basis) == 0:
        return f_s.copy()
    if len(basis) == 1:
        k = sum(c * rep_s.generators[a] for a, c in enumerate(basis[0]))
        vals, vecs = np.linalg.eigh(k)
        fb = dagger(vecs) @ f_s @ vecs
        keep = np.abs(vals[:, None] - vals[None, :]) <= 1e3 * tol.weighted(max(1.0, np.abs(vals).max()))
        return vecs @ (fb * keep) @ dagger(vecs)
    if len(basis) == 3 and isinstance(h.parent, LieDescriptor) and h.parent.kind == "SU2":
        return group_average(rep_s, f_s, mode="twirl", measure_scale=1.0, tol=tol)
    raise ValueError(f"unsupported isotropy type: algebra dimension {len(basis)}")


def system_projector(s: Scenario, frame_name: str, g, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Pi_S^phys(g) = Vol_frame (<phi(g)| x 1) P_phys (|phi(g)> x 1); orthogonal projector."""
    frame = s.frame(frame_name)
    ps = physical_space(s, tol)
    phi = frame.orientation(frame.rep.element(g))
    cond = np.column_stack(
        [s.condition_vector(frame_name, phi, ps.basis.basis[:, k]) for k in range(ps.dim)]
    ) if ps.dim else np.zeros((s.complement_dim(frame_name), 0), dtype=complex)
    proj = frame.weight_scale * (cond @ dagger(cond))
    defect = max(
        float(np.linalg.norm(proj @ proj - proj)),
        float(np.linalg.norm(proj - dagger(proj))),
    )
    if defect > 1e5 * tol.weighted(1.0) * max(1, proj.shape[0]):
        raise ValueError(f"system projector failed idempotence/Hermiticity ({defect:.2e})")
    return proj


def orientation_independent(s: Scenario, frame_name: str, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff the physical system subspace does not rotate with the frame orientation."""
    frame = s.frame(frame_name)
    pi_e = system_projector(s, frame_name, frame.rep.identity_element(), tol)
    comp = s.complement_rep(frame_name)
    checks = comp.matrices if comp.is_finite else comp.generators
    scale = max(1.0, max(float(np.abs(c).max()) for c in checks))
    thresh = 1e5 * tol.weighted(scale)
    return all(float(np.linalg.norm(c @ pi_e - pi_e @ c)) <= thresh for c in checks)


def physical_system_span(s: Scenario, frame_name: str, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Span of the physical system subspaces over all frame orientations."""
    frame = s.frame(frame_name)
    pi_e = system_projector(s, frame_name, frame.rep.identity_element(), tol)
    base = orthonormal_range(pi_e, tol)
    comp = s.complement_rep(frame_name)
    ops = list(comp.matrices) if comp.is_finite else list(comp.generators)
    basis = base.basis
    if basis.shape[1] == 0:
        return base
    while True:
        grown = np.hstack([basis] + [op @ basis for op in ops])
        new_basis = orthonormal_range(grown, tol).basis
        if new_basis.shape[1] == basis.shape[1]:
            return Subspace(comp.dim, new_basis)
        basis = new_basis


def sample_elements(group, count: int = 8) -> list:
    """Deterministic sample of group elements used by property checks."""
    if isinstance(group, FiniteGroup):
        return [groups.FiniteElement(group, k) for k in range(group.order)]
    if group.kind == "U1":
        return [groups.lie_element(group, [2.0 * np.pi * k / count + 0.1]) for k in range(count)]
    rng = np.random.default_rng(7)
    return [groups.lie_element(group, rng.uniform(-1.5, 1.5, size=3)) for _ in range(count)]


def check_weak_homomorphism(
    s: Scenario,
    frame_name: str,
    g,
    a: np.ndarray,
    b: np.ndarray,
    tol: Tolerance = DEFAULT_TOL,
) -> dict:
    """Residuals of the relationalization homomorphism for a pair of observables.

    Weak residuals are evaluated on the physical basis, strong residuals on a
    fixed random kinematical vector; strong equality is expected only for
    regular-representation frames.
    """
    frame = s.frame(frame_name)
    ps = physical_space(s, tol)
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    pi = system_projector(s, frame_name, g, tol)
    a_p = pi @ a @ pi
    b_p = pi @ b @ pi

    def rel(f):
        return relational_observable(s, frame_name, g, f, tol, check=False).matrix

    f_a, f_b = rel(a_p), rel(b_p)
    pairs = {
        "addition": (rel(a_p + b_p), f_a + f_b),
        "multiplication": (rel(a_p @ b_p), f_a @ f_b),
        "combined": (rel(a_p + b_p @ a_p), f_a + f_b @ f_a),
        "projection_equivalence": (rel(a), f_a),
    }
    report: dict = {"frame": frame_name, "weak": {}, "strong": {}}
    basis_sub = ps.basis
    rng = np.random.default_rng(11)
    v = rng.standard_normal(s.kin_dim) + 1j * rng.standard_normal(s.kin_dim)
    v /= np.linalg.norm(v)
    for name, (lhs, rhs) in pairs.items():
        diff = lhs - rhs
        weak = float(np.max(np.linalg.norm(diff @ basis_sub.basis, axis=0))) if ps.dim else 0.0
        report["weak"][name] = weak
        report["strong"][name] = float(np.linalg.norm(diff @ v))
    # adjoint clause on the restricted matrices
    ra = ps.restrict(rel(dagger(a_p)))
    report["weak"]["adjoint"] = float(np.linalg.norm(ra - dagger(ps.restrict(f_a))))
    report["strong"]["adjoint"] = report["weak"]["adjoint"]
    report["max_weak_residual"] = max(report["weak"].values())
    report["max_strong_residual"] = max(report["strong"].values())
    scale = max(1.0, float(np.abs(a).max()), float(np.abs(b).max())) ** 2
    report["weak_pass"] = report["max_weak_residual"] <= 1e7 * tol.weighted(scale)
    report["strong_pass"] = report["max_strong_residual"] <= 1e7 * tol.weighted(scale)
    return report


def conditional_inner_product_check(
    s: Scenario,
    frame_name: str,
    psi: np.ndarray,
    chi: np.ndarray,
    g_samples: list | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> dict:
    """Check <psi|chi> = Vol_frame <psi| (|phi(g)><phi(g)| x 1) |chi> for sampled g."""
    frame = s.frame(frame_name)
    ps = physical_space(s, tol)
    psi = as_cvector(psi)
    chi = as_cvector(chi)
    for v, label in ((psi, "psi"), (chi, "chi")):
        if not ps.contains(v, Tolerance(1e-6, 1e-6)):
            raise ValueError(f"{label} is not a physical state")
    if g_samples is None:
        g_samples = sample_elements(frame.group)
    expected = complex(np.vdot(psi, chi))
    deviations = []
    for g in g_samples:
        phi = frame.orientation(frame.rep.element(g))
        lhs = frame.weight_scale * complex(
            np.vdot(s.condition_vector(frame_name, phi, psi), s.condition_vector(frame_name, phi, chi))
        )
        deviations.append(abs(lhs - expected))
    return {
        "frame": frame_name,
        "expected": expected,
        "max_deviation": float(max(deviations)),
        "samples": len(g_samples),
        "pass": max(deviations) <= 1e4 * tol.weighted(1.0),
    }

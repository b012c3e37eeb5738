"""Dense complex linear algebra with tolerance-gated rank decisions.

Every other module routes its rank/kernel/range decisions through here so
that the whole library shares one thresholding convention and one
deterministic phase/ordering convention for golden tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Tolerance",
    "Subspace",
    "as_cmatrix",
    "as_cvector",
    "fix_phase",
    "orthonormal_range",
    "nullspace",
    "joint_fixed_subspace",
    "equal_on_subspace",
    "dagger",
    "frobenius",
]


@dataclass(frozen=True)
class Tolerance:
    """Absolute / relative tolerance pair used for all rank decisions."""

    abs_tol: float = 1e-9
    rel_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")

    def weighted(self, scale: float) -> float:
        """Effective tolerance for quantities of magnitude ``scale``."""
        return self.abs_tol + self.rel_tol * abs(scale)


DEFAULT_TOL = Tolerance()


def as_cmatrix(m: np.ndarray) -> np.ndarray:
    """Coerce to a finite 2-D complex array (shared validation gate)."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_cvector(v: np.ndarray) -> np.ndarray:
    a = np.asarray(v, dtype=complex).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise ValueError("vector has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def fix_phase(v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Rotate the global phase so the first significant component is real > 0."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    top = mags.max(initial=0.0)
    if top == 0.0:
        return v.copy()
    idx = int(np.argmax(mags > tol.weighted(top)))
    pivot = v[idx]
    if abs(pivot) == 0.0:
        return v.copy()
    return v * (abs(pivot) / pivot)


def _order_key(v: np.ndarray, cluster: float) -> tuple:
    """Fixed-length sort key on the leading significant components."""
    sig = np.flatnonzero(np.abs(v) > cluster)
    lead = [int(i) for i in sig[:4]]
    mags = [float(round(abs(v[i]), 6)) for i in sig[:4]]
    pad = 4 - len(lead)
    return tuple(lead + [len(v)] * pad) + tuple(mags + [0.0] * pad)


def canonicalize_basis(basis: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Deterministically order and phase-fix the columns of an orthonormal basis.

    Ordering is by position of the leading significant components, which keeps
    coordinate-aligned subspaces (e.g. charge eigenspaces) in ket order.
    """
    if basis.shape[1] == 0:
        return basis
    cluster = max(tol.abs_tol, 1e-6)
    cols = [fix_phase(basis[:, j], tol) for j in range(basis.shape[1])]
    cols.sort(key=lambda c: _order_key(c, cluster))
    return np.column_stack(cols)


@dataclass(frozen=True)
class Subspace:
    """Orthonormal basis of a subspace of C^ambient_dim (columns of ``basis``)."""

    ambient_dim: int
    basis: np.ndarray  # shape (ambient_dim, dim)

    def __post_init__(self) -> None:
        b = self.basis
        if b.shape[0] != self.ambient_dim:
            raise ValueError("basis rows do not match ambient dimension")
        gram = dagger(b) @ b
        if b.shape[1] and frobenius(gram - np.eye(b.shape[1])) > 1e-7:
            raise ValueError("basis is not orthonormal")

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ dagger(self.basis)

    def contains(self, v: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> bool:
        v = as_cvector(v)
        resid = v - self.basis @ (dagger(self.basis) @ v)
        return float(np.linalg.norm(resid)) <= tol.weighted(np.linalg.norm(v))


def orthonormal_range(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> Subspace:
    """Orthonormal basis of the column space of ``m``.

    Singular directions with singular value <= abs_tol * max(1, sigma_max)
    are dropped.
    """
    a = as_cmatrix(m)
    if a.shape[1] == 0 or not np.any(a):
        return Subspace(a.shape[0], np.zeros((a.shape[0], 0), dtype=complex))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    cut = tol.abs_tol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return Subspace(a.shape[0], canonicalize_basis(u[:, :rank], tol))


def nullspace(m: np.ndarray, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ker(m), same threshold rule as the range."""
    a = as_cmatrix(m)
    _, s, vh = np.linalg.svd(a)
    cut = tol.abs_tol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > cut))
    return dagger(vh)[:, rank:]


def joint_fixed_subspace(
    ops: list[np.ndarray],
    tol: Tolerance = DEFAULT_TOL,
    mode: str = "unitary",
) -> Subspace:
    """Orthonormal basis of the joint fixed space of a family of operators.

    mode="unitary"    -> intersection of ker(op - 1)
    mode="generator"  -> intersection of ker(op)
    """
    if mode not in ("unitary", "generator"):
        raise ValueError(f"unknown mode {mode!r}")
    mats = [as_cmatrix(op) for op in ops]
    if not mats:
        raise ValueError("need at least one operator")
    dim = mats[0].shape[0]
    for m in mats:
        if m.shape != (dim, dim):
            raise ValueError("operators must be square and of equal dimension")
    basis = np.eye(dim, dtype=complex)
    for m in mats:
        if basis.shape[1] == 0:
            break
        target = m - np.eye(dim) if mode == "unitary" else m
        basis = basis @ nullspace(target @ basis, tol)
    if basis.shape[1]:
        # re-orthonormalize and canonicalize after the sequential restrictions
        q, _ = np.linalg.qr(basis)
        basis = canonicalize_basis(q[:, : basis.shape[1]], tol)
    return Subspace(dim, basis)


def equal_on_subspace(
    a: np.ndarray,
    b: np.ndarray,
    s: Subspace,
    tol: Tolerance = DEFAULT_TOL,
) -> bool:
    """Weak equality: ||(a - b) v|| <= tol for every basis vector v of ``s``."""
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    if a.shape != b.shape or a.shape[1] != s.ambient_dim:
        raise ValueError("operator dimensions do not match the subspace")
    if s.dim == 0:
        return True
    scale = max(np.abs(a).max(), np.abs(b).max(), 1.0)
    resid = (a - b) @ s.basis
    return float(np.max(np.linalg.norm(resid, axis=0))) <= tol.weighted(scale)

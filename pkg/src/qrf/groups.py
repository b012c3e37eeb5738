"""Finite groups and the compact Lie groups U(1) and SU(2).

Finite groups are index sets with a validated Cayley table; Lie groups are
descriptors carrying a basis of the (anti-Hermitized) algebra.  Group
elements are indices (finite) or real generator coordinates (Lie), with
SU(2) composition routed through the defining spin-1/2 matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "FiniteGroup",
    "LieDescriptor",
    "FiniteElement",
    "LieElement",
    "Subgroup",
    "finite_group_from_table",
    "load_group_table",
    "cosets",
    "lie_element",
    "u1",
    "su2",
    "cyclic",
    "symmetric_3",
    "dihedral_4",
    "quaternion_8",
    "builtin_group",
]

_ASSOC_FULL_LIMIT = 64
_ASSOC_SAMPLES = 4096

# Pauli matrices in the convention [s_i, s_j] = 2i eps_ijk s_k.
PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group on indices 0..order-1 with a validated product table.

    Compared by identity; the same table loaded twice gives distinct groups.
    """

    order: int
    product_table: np.ndarray  # shape (order, order), int indices
    identity_index: int
    name: str = "group"
    inverse_table: np.ndarray = field(repr=False, default=None)

    def mult(self, a: int, b: int) -> int:
        return int(self.product_table[a, b])

    def inverse(self, a: int) -> int:
        return int(self.inverse_table[a])

    def elements(self) -> range:
        return range(self.order)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.product_table, self.product_table.T))


@dataclass(frozen=True, eq=False)
class LieDescriptor:
    """Descriptor of U(1) or SU(2) with its structure constants."""

    kind: str  # "U1" | "SU2"
    algebra_dim: int
    generator_names: tuple[str, ...]
    structure_constants: np.ndarray  # f[a,b,c] with [K_a,K_b] = 2i f_abc K_c

    def __post_init__(self) -> None:
        f = self.structure_constants
        if not np.allclose(f, -np.swapaxes(f, 0, 1)):
            raise ValueError("structure constants must be antisymmetric in the first pair")


@dataclass(frozen=True)
class FiniteElement:
    group: FiniteGroup
    index: int


@dataclass(frozen=True)
class LieElement:
    """exp(i sum_a coords[a] K_a); U(1) keeps the angle reduced mod 2pi."""

    descriptor: LieDescriptor
    coords: tuple[float, ...]


@dataclass(frozen=True)
class Subgroup:
    """Finite: member index set. Lie: algebra directions, discrete part unknown."""

    parent: object
    element_indices: tuple[int, ...] | None = None
    algebra_basis: tuple[tuple[float, ...], ...] | None = None
    discrete_part_unknown: bool = False

    @property
    def order(self) -> int:
        if self.element_indices is None:
            raise ValueError("not a finite subgroup")
        return len(self.element_indices)


def _u1() -> LieDescriptor:
    return LieDescriptor("U1", 1, ("Z",), np.zeros((1, 1, 1)))


def _su2() -> LieDescriptor:
    eps = np.zeros((3, 3, 3))
    for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[a, b, c] = 1.0
        eps[b, a, c] = -1.0
    return LieDescriptor("SU2", 3, ("X", "Y", "Z"), eps)


_U1 = _u1()
_SU2 = _su2()


def u1() -> LieDescriptor:
    return _U1


def su2() -> LieDescriptor:
    return _SU2


def lie_element(desc: LieDescriptor, coords) -> LieElement:
    c = np.asarray(coords, dtype=float).reshape(-1)
    if c.size != desc.algebra_dim:
        raise ValueError(f"expected {desc.algebra_dim} coordinates, got {c.size}")
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite coordinates")
    if desc.kind == "U1":
        c = np.mod(c, 2.0 * np.pi)
    return LieElement(desc, tuple(float(x) for x in c))


def _su2_defining(coords: tuple[float, ...]) -> np.ndarray:
    k = sum(c * PAULI[n] for c, n in zip(coords, ("X", "Y", "Z")))
    # closed form of exp(i theta n.sigma)
    theta = float(np.sqrt(sum(c * c for c in coords)))
    if theta < 1e-300:
        return np.eye(2, dtype=complex)
    n = k / theta
    return np.cos(theta) * np.eye(2, dtype=complex) + 1j * np.sin(theta) * n


def _su2_coords_from_matrix(m: np.ndarray) -> tuple[float, float, float]:
    """Invert exp(i theta n.sigma); at theta = pi the axis defaults to Z."""
    # m = cos(theta) 1 + i sin(theta) n.sigma
    ct = float(np.real(m[0, 0] + m[1, 1])) / 2.0
    sv = np.array(
        [
            np.imag(m[0, 1] + m[1, 0]) / 2.0,
            np.real(m[0, 1] - m[1, 0]) / 2.0,
            np.imag(m[0, 0] - m[1, 1]) / 2.0,
        ]
    )
    st = float(np.linalg.norm(sv))
    theta = float(np.arctan2(st, ct))
    if st < 1e-12:
        return (0.0, 0.0, 0.0) if ct > 0 else (0.0, 0.0, float(np.pi))
    n = sv / st
    return tuple(float(theta * x) for x in n)


def compose(g: object, h: object) -> object:
    """Group product g*h on elements of matching type."""
    if isinstance(g, FiniteElement) and isinstance(h, FiniteElement):
        if g.group is not h.group:
            raise ValueError("elements from different groups")
        return FiniteElement(g.group, g.group.mult(g.index, h.index))
    if isinstance(g, LieElement) and isinstance(h, LieElement):
        desc = g.descriptor
        if desc.kind != h.descriptor.kind:
            raise ValueError("elements from different groups")
        if desc.kind == "U1":
            return lie_element(desc, [g.coords[0] + h.coords[0]])
        m = _su2_defining(g.coords) @ _su2_defining(h.coords)
        return lie_element(desc, _su2_coords_from_matrix(m))
    raise TypeError("cannot compose elements of different kinds")


def inverse(g: object) -> object:
    if isinstance(g, FiniteElement):
        return FiniteElement(g.group, g.group.inverse(g.index))
    if isinstance(g, LieElement):
        if g.descriptor.kind == "U1":
            return lie_element(g.descriptor, [-g.coords[0]])
        return lie_element(g.descriptor, [-c for c in g.coords])
    raise TypeError(f"not a group element: {g!r}")


def identity_of(group: object) -> object:
    if isinstance(group, FiniteGroup):
        return FiniteElement(group, group.identity_index)
    if isinstance(group, LieDescriptor):
        return lie_element(group, np.zeros(group.algebra_dim))
    raise TypeError(f"not a group: {group!r}")


def finite_group_from_table(table, name: str = "group") -> FiniteGroup:
    """Validate a Cayley table (Latin square, identity, inverses, associativity)."""
    t = np.asarray(table, dtype=int)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("product table must be square")
    n = t.shape[0]
    if t.min() < 0 or t.max() >= n:
        raise ValueError("table entries must be element indices")
    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(t[i]), full) or not np.array_equal(np.sort(t[:, i]), full):
            raise ValueError("not a Latin square")
    identity = None
    for e in range(n):
        if np.array_equal(t[e], full) and np.array_equal(t[:, e], full):
            identity = e
            break
    if identity is None:
        raise ValueError("no identity element")
    inv = np.full(n, -1, dtype=int)
    for a in range(n):
        hits = np.flatnonzero(t[a] == identity)
        if hits.size != 1 or t[hits[0], a] != identity:
            raise ValueError("inverses missing or not two-sided")
        inv[a] = hits[0]
    if n <= _ASSOC_FULL_LIMIT:
        # (ab)c == a(bc) for all triples, vectorized
        ab_c = t[t, :]            # [a,b,c] -> (ab)c
        a_bc = t[:, t]            # [a,b,c] -> a(bc)
        if not np.array_equal(ab_c, a_bc):
            raise ValueError("product table is not associative")
    else:
        rng = np.random.default_rng(0)
        trip = rng.integers(0, n, size=(_ASSOC_SAMPLES, 3))
        for a, b, c in trip:
            if t[t[a, b], c] != t[a, t[b, c]]:
                raise ValueError("product table is not associative")
    return FiniteGroup(n, t, identity, name=name, inverse_table=inv)


def load_group_table(source: str | Path, name: str | None = None) -> FiniteGroup:
    """Load a Cayley table from a JSON array-of-rows or whitespace text file."""
    path = Path(source)
    text = path.read_text()
    stripped = text.lstrip()
    if stripped.startswith("["):
        rows = json.loads(text)
    else:
        rows = [[int(x) for x in line.split()] for line in text.splitlines() if line.strip()]
    return finite_group_from_table(rows, name=name or path.stem)


def cosets(g: FiniteGroup, h: Subgroup, side: str = "left") -> list[frozenset[int]]:
    """Partition of g into left (gH) or right (Hg) cosets of the subgroup h."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    members = h.element_indices
    if members is None:
        raise ValueError("cosets need a finite subgroup")
    mem = set(members)
    if g.identity_index not in mem:
        raise ValueError("subgroup must contain the identity")
    for a in members:
        if g.inverse(a) not in mem:
            raise ValueError("subgroup not closed under inverse")
        for b in members:
            if g.mult(a, b) not in mem:
                raise ValueError("subgroup not closed under product")
    seen: set[int] = set()
    out: list[frozenset[int]] = []
    for a in g.elements():
        if a in seen:
            continue
        if side == "left":
            cs = frozenset(g.mult(a, m) for m in members)
        else:
            cs = frozenset(g.mult(m, a) for m in members)
        seen |= cs
        out.append(cs)
    return out


def cyclic(n: int) -> FiniteGroup:
    if not 1 <= n <= 32:
        raise ValueError("cyclic groups provided for 1 <= n <= 32")
    idx = np.arange(n)
    table = (idx[:, None] + idx[None, :]) % n
    return finite_group_from_table(table, name=f"Z{n}")


def _perm_group(perms: list[tuple[int, ...]], name: str) -> FiniteGroup:
    index = {p: i for i, p in enumerate(perms)}
    n = len(perms)
    table = np.zeros((n, n), dtype=int)
    for i, p in enumerate(perms):
        for j, q in enumerate(perms):
            table[i, j] = index[tuple(p[q[k]] for k in range(len(p)))]
    return finite_group_from_table(table, name=name)


def symmetric_3() -> FiniteGroup:
    import itertools

    perms = sorted(itertools.permutations(range(3)))
    return _perm_group(list(perms), "S3")


def dihedral_4() -> FiniteGroup:
    # symmetries of the square acting on vertex labels 0..3
    rots = [tuple((k + r) % 4 for k in range(4)) for r in range(4)]
    refl = [tuple((r - k) % 4 for k in range(4)) for r in range(4)]
    return _perm_group(rots + refl, "D4")


def quaternion_8() -> FiniteGroup:
    # elements 1, -1, i, -i, j, -j, k, -k as pairs (axis, sign)
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    mul = {}
    base = {
        ("1", "1"): "1", ("1", "i"): "i", ("1", "j"): "j", ("1", "k"): "k",
        ("i", "1"): "i", ("j", "1"): "j", ("k", "1"): "k",
        ("i", "i"): "-1", ("j", "j"): "-1", ("k", "k"): "-1",
        ("i", "j"): "k", ("j", "k"): "i", ("k", "i"): "j",
        ("j", "i"): "-k", ("k", "j"): "-i", ("i", "k"): "-j",
    }

    def split(x: str) -> tuple[int, str]:
        return (-1, x[1:]) if x.startswith("-") else (1, x)

    for a in names:
        for b in names:
            sa, ua = split(a)
            sb, ub = split(b)
            sc, uc = split(base[(ua, ub)])
            sign = sa * sb * sc
            mul[(a, b)] = uc if sign == 1 else "-" + uc
    table = [[names.index(mul[(a, b)]) for b in names] for a in names]
    return finite_group_from_table(table, name="Q8")


_BUILTIN_FACTORIES = {
    "S3": symmetric_3,
    "D4": dihedral_4,
    "Q8": quaternion_8,
}


def builtin_group(name: str) -> FiniteGroup:
    """Builtin finite groups: Zn (n <= 32), S3, D4, Q8."""
    key = name.strip().upper()
    if key.startswith("Z") and key[1:].isdigit():
        return cyclic(int(key[1:]))
    factory = _BUILTIN_FACTORIES.get(key)
    if factory is None:
        raise ValueError(f"unknown builtin group {name!r}")
    return factory()

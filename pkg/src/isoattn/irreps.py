"""Real irreducible characters and isotypic projectors.

For a group H acting on window positions, the isotypic projector of an irrep
with character chi and coefficient c is

    P = (c / |H|) * sum_h chi(h^-1) * action(h)

where c is the irrep dimension, except for a merged conjugate pair of complex
characters, whose stored real character is chi + conj(chi) and whose
coefficient is the complex dimension of one member (half the real dimension).
The projectors of a group are symmetric, idempotent, mutually orthogonal, sum
to the identity, and commute with the action.

Character data: cyclic groups get the trivial character, the sign character
for even order, and merged pairs 2*cos(2*pi*j*m/n); dihedral groups get the
2 or 4 one-dimensional characters plus two-dimensional ones with
chi(rot_m) = 2*cos(2*pi*j*m/n) and 0 on reflections; symmetric groups up to
k = 5 use tabulated integer tables keyed by cycle type.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groups import FiniteGroup, permutation_matrix
from .numerics import Matrix, frobenius_sq

_INTEGRALITY_TOL = 1e-9


@dataclass(frozen=True)
class RealIrrep:
    """A real irreducible character, one value per group element.

    `dim` is the dimension over the reals; `pair` marks a merged pair of
    complex-conjugate characters (then dim = 2 and the values are chi + chibar).
    The value at the identity always equals dim.
    """

    label: str
    dim: int
    characters: tuple[float, ...]
    pair: bool = False


def _cyclic_irreps(g: FiniteGroup) -> list[RealIrrep]:
    n = g.n
    out = [RealIrrep("trivial", 1, (1.0,) * n)]
    if n % 2 == 0:
        out.append(RealIrrep("sign", 1, tuple(float((-1) ** m) for m in range(n))))
    for j in range(1, (n + 1) // 2):
        vals = tuple(2.0 * math.cos(2.0 * math.pi * j * m / n) for m in range(n))
        out.append(RealIrrep(f"rot_{j}", 2, vals, pair=True))
    return out


def _dihedral_irreps(g: FiniteGroup) -> list[RealIrrep]:
    n = g.n
    # Element order matches the constructor: rotations 0..n-1, then reflections.
    rot = list(range(n))
    out = [RealIrrep("trivial", 1, (1.0,) * (2 * n))]
    out.append(RealIrrep("sign", 1, tuple([1.0] * n + [-1.0] * n)))
    if n % 2 == 0:
        alt_rot = [float((-1) ** m) for m in rot]
        out.append(RealIrrep("alt", 1, tuple(alt_rot + alt_rot)))
        out.append(RealIrrep("alt_sign", 1, tuple(alt_rot + [-v for v in alt_rot])))
    for j in range(1, (n + 1) // 2):
        vals = [2.0 * math.cos(2.0 * math.pi * j * m / n) for m in rot] + [0.0] * n
        out.append(RealIrrep(f"rot_{j}", 2, tuple(vals)))
    return out


# Symmetric group character tables keyed by cycle type, k <= 5. Rows are
# (label, dim, {cycle_type: value}).
_SYMMETRIC_TABLES: dict[int, list[tuple[str, int, dict[tuple[int, ...], int]]]] = {
    1: [("trivial", 1, {(1,): 1})],
    2: [("trivial", 1, {(1, 1): 1, (2,): 1}),
        ("sign", 1, {(1, 1): 1, (2,): -1})],
    3: [("trivial", 1, {(1, 1, 1): 1, (2, 1): 1, (3,): 1}),
        ("sign", 1, {(1, 1, 1): 1, (2, 1): -1, (3,): 1}),
        ("std", 2, {(1, 1, 1): 2, (2, 1): 0, (3,): -1})],
    4: [("trivial", 1, {(1, 1, 1, 1): 1, (2, 1, 1): 1, (2, 2): 1, (3, 1): 1, (4,): 1}),
        ("sign", 1, {(1, 1, 1, 1): 1, (2, 1, 1): -1, (2, 2): 1, (3, 1): 1, (4,): -1}),
        ("p22", 2, {(1, 1, 1, 1): 2, (2, 1, 1): 0, (2, 2): 2, (3, 1): -1, (4,): 0}),
        ("std", 3, {(1, 1, 1, 1): 3, (2, 1, 1): 1, (2, 2): -1, (3, 1): 0, (4,): -1}),
        ("std_sign", 3, {(1, 1, 1, 1): 3, (2, 1, 1): -1, (2, 2): -1, (3, 1): 0, (4,): 1})],
    5: [("trivial", 1, {(1, 1, 1, 1, 1): 1, (2, 1, 1, 1): 1, (2, 2, 1): 1,
                        (3, 1, 1): 1, (3, 2): 1, (4, 1): 1, (5,): 1}),
        ("sign", 1, {(1, 1, 1, 1, 1): 1, (2, 1, 1, 1): -1, (2, 2, 1): 1,
                     (3, 1, 1): 1, (3, 2): -1, (4, 1): -1, (5,): 1}),
        ("std", 4, {(1, 1, 1, 1, 1): 4, (2, 1, 1, 1): 2, (2, 2, 1): 0,
                    (3, 1, 1): 1, (3, 2): -1, (4, 1): 0, (5,): -1}),
        ("std_sign", 4, {(1, 1, 1, 1, 1): 4, (2, 1, 1, 1): -2, (2, 2, 1): 0,
                         (3, 1, 1): 1, (3, 2): 1, (4, 1): 0, (5,): -1}),
        ("p32", 5, {(1, 1, 1, 1, 1): 5, (2, 1, 1, 1): 1, (2, 2, 1): 1,
                    (3, 1, 1): -1, (3, 2): 1, (4, 1): -1, (5,): 0}),
        ("p221", 5, {(1, 1, 1, 1, 1): 5, (2, 1, 1, 1): -1, (2, 2, 1): 1,
                     (3, 1, 1): -1, (3, 2): -1, (4, 1): 1, (5,): 0}),
        ("p311", 6, {(1, 1, 1, 1, 1): 6, (2, 1, 1, 1): 0, (2, 2, 1): -2,
                     (3, 1, 1): 0, (3, 2): 0, (4, 1): 0, (5,): 1})],
}


def _symmetric_irreps(g: FiniteGroup) -> list[RealIrrep]:
    table = _SYMMETRIC_TABLES[g.n]
    types = [p.cycle_type() for p in g.elements]
    out = []
    for label, dim, by_type in table:
        out.append(RealIrrep(label, dim, tuple(float(by_type[t]) for t in types)))
    return out


def real_irreps(g: FiniteGroup) -> tuple[RealIrrep, ...]:
    """The complete list of real irreducible characters of a built-in group."""
    if g.kind == "cyclic":
        irreps = _cyclic_irreps(g)
    elif g.kind == "dihedral":
        irreps = _dihedral_irreps(g)
    elif g.kind == "symmetric":
        irreps = _symmetric_irreps(g)
    else:
        raise ValueError(f"real_irreps: no character data for group kind {g.kind!r}")
    # Cheap structural checks on the table before anything downstream uses it:
    # identity value equals the dimension, complex dimensions square-sum to |H|.
    sq = 0
    for ir in irreps:
        if len(ir.characters) != g.order:
            raise RuntimeError(f"character length mismatch for {ir.label}")
        if abs(ir.characters[g.identity_index] - ir.dim) > 1e-12:
            raise RuntimeError(f"character of {ir.label} at identity differs from its dimension")
        sq += 2 * (ir.dim // 2) ** 2 if ir.pair else ir.dim**2
    if sq != g.order:
        raise RuntimeError(f"characters of {g.descriptor} square-sum to {sq}, expected {g.order}")
    return tuple(irreps)


def _projector_coefficient(irrep: RealIrrep) -> float:
    # Merged pairs use the complex dimension of one member.
    return irrep.dim / 2.0 if irrep.pair else float(irrep.dim)


def _check_member(g: FiniteGroup, irrep: RealIrrep) -> None:
    for candidate in real_irreps(g):
        if candidate.label == irrep.label and candidate == irrep:
            return
    raise ValueError(f"irrep {irrep.label!r} does not belong to group {g.descriptor}")


def isotypic_projector(g: FiniteGroup, irrep: RealIrrep) -> Matrix:
    """Average the action against the character, as in the formula above."""
    _check_member(g, irrep)
    k = g.degree
    acc = np.zeros((k, k), dtype=np.float64)
    for h in range(g.order):
        acc += irrep.characters[g.inverse[h]] * permutation_matrix(g.elements[h])
    return acc * (_projector_coefficient(irrep) / g.order)


@dataclass(frozen=True, eq=False)
class ProjectorItem:
    irrep: RealIrrep
    projector: Matrix
    multiplicity: int

    @property
    def absent(self) -> bool:
        return self.multiplicity == 0


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    """All isotypic projectors of a group action on its window."""

    group: FiniteGroup
    window: int
    items: tuple[ProjectorItem, ...]


def projector_set(g: FiniteGroup) -> ProjectorSet:
    """Build every projector of the action, with integer multiplicities.

    The multiplicity of an irrep is trace(P)/dim; a non-integer value (beyond
    1e-9) means the character data and the action disagree, which is an
    internal error. Irreps that do not occur are kept with an exactly zero
    projector and flagged absent.
    """
    items = []
    total_dim = 0
    for irrep in real_irreps(g):
        p = isotypic_projector(g, irrep)
        m_real = float(np.trace(p)) / irrep.dim
        m = round(m_real)
        if abs(m_real - m) > _INTEGRALITY_TOL:
            raise RuntimeError(
                f"projector_set: non-integer multiplicity {m_real!r} for "
                f"{irrep.label} of {g.descriptor}")
        if m == 0:
            p = np.zeros_like(p)
        p.setflags(write=False)
        items.append(ProjectorItem(irrep=irrep, projector=p, multiplicity=m))
        total_dim += irrep.dim * m
    if total_dim != g.degree:
        raise RuntimeError(
            f"projector_set: multiplicities of {g.descriptor} fill {total_dim} "
            f"of {g.degree} dimensions")
    return ProjectorSet(group=g, window=g.degree, items=tuple(items))


@dataclass(frozen=True)
class ProjectorSetReport:
    """Maximum Frobenius-norm deviations from the projector identities."""

    idempotency: float
    orthogonality: float
    completeness: float
    symmetry: float
    commutation: float

    def max_deviation(self) -> float:
        return max(self.idempotency, self.orthogonality, self.completeness,
                   self.symmetry, self.commutation)

    def ok(self, tol: float = 1e-12) -> bool:
        return self.max_deviation() < tol


def verify_projector_set(ps: ProjectorSet) -> ProjectorSetReport:
    projs = [item.projector for item in ps.items]
    idem = max(math.sqrt(frobenius_sq(p @ p - p)) for p in projs)
    sym = max(math.sqrt(frobenius_sq(p - p.T)) for p in projs)
    orth = 0.0
    for i, p in enumerate(projs):
        for q in projs[i + 1:]:
            orth = max(orth, math.sqrt(frobenius_sq(p @ q)))
    comp = math.sqrt(frobenius_sq(sum(projs) - np.eye(ps.window)))
    comm = 0.0
    for mat in ps.group.element_matrices():
        for p in projs:
            comm = max(comm, math.sqrt(frobenius_sq(p @ mat - mat @ p)))
    return ProjectorSetReport(idempotency=idem, orthogonality=orth,
                              completeness=comp, symmetry=sym, commutation=comm)


@dataclass(frozen=True, eq=False)
class LoadedProjector:
    label: str
    dim: int
    multiplicity: int
    pair: bool
    matrix: Matrix


@dataclass(frozen=True, eq=False)
class LoadedProjectorSet:
    descriptor: str
    window: int
    items: tuple[LoadedProjector, ...]


def save_projectors(ps: ProjectorSet, path: str) -> None:
    """Write a projector set as structured text, entries at 17 significant
    digits so a round-trip through load_projectors is bit-exact."""
    lines = [f"group {ps.group.descriptor}", f"window {ps.window}"]
    for item in ps.items:
        ir = item.irrep
        lines.append(f"irrep {ir.label} dim {ir.dim} mult {item.multiplicity} pair {int(ir.pair)}")
        for row in item.projector:
            lines.append("  " + " ".join(format(v, ".17g") for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_projectors(path: str) -> LoadedProjectorSet:
    descriptor = ""
    window = 0
    items: list[LoadedProjector] = []
    label = ""
    dim = mult = pair = 0
    rows: list[list[float]] = []

    def flush():
        if label:
            m = np.asarray(rows, dtype=np.float64)
            if m.shape != (window, window):
                raise ValueError(f"projector file {path!r}: {label} has shape {m.shape}")
            m.setflags(write=False)
            items.append(LoadedProjector(label, dim, mult, bool(pair), m))

    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("group "):
                descriptor = line.split(None, 1)[1]
            elif line.startswith("window "):
                window = int(line.split()[1])
            elif line.startswith("irrep "):
                flush()
                toks = line.split()
                label, dim, mult, pair = toks[1], int(toks[3]), int(toks[5]), int(toks[7])
                rows = []
            else:
                rows.append([float(t) for t in line.split()])
    flush()
    if not descriptor or window < 1:
        raise ValueError(f"projector file {path!r} is missing its header")
    return LoadedProjectorSet(descriptor=descriptor, window=window, items=tuple(items))

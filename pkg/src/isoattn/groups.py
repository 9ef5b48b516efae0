"""Finite permutation groups acting on token windows.

A group here is a concrete list of permutations of window positions together
with its abstract multiplication table. The table is built from the family
structure (not by permutation lookup), so actions that are not faithful, such
as the dihedral groups on 1 or 2 points, still carry the full abstract group.

Families:
    cyclic_group(n)      order n, shift action on an n-window
    dihedral_group(n)    order 2n, rotations and reflections of an n-window
    symmetric_group(k)   order k!, all permutations of a k-window (k <= 5)
    mirror_group(k)      order 2, index reversal on a k-window
    shift_group(k, s)    order k/s, generated by shift-by-s on a k-window
    trivial_group(k)     order 1 on a k-window
    from_permutations    custom group from an explicit closed permutation list

The window action is row-based: element h moves row j of a window matrix to
row h(j), i.e. (action(h) x)[i] = x[h^-1(i)].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .numerics import Matrix

_MAX_ORDER = 120
_MAX_SYMMETRIC = 5


@dataclass(frozen=True)
class Permutation:
    """Bijection of 0..k-1, stored as the image tuple mapping[i] = image of i."""

    mapping: tuple[int, ...]

    def __post_init__(self):
        k = len(self.mapping)
        if k == 0 or sorted(self.mapping) != list(range(k)):
            raise ValueError(f"mapping {self.mapping!r} is not a bijection of 0..{k - 1}")

    @property
    def degree(self) -> int:
        return len(self.mapping)

    def __call__(self, i: int) -> int:
        return self.mapping[i]

    def compose(self, other: "Permutation") -> "Permutation":
        """Apply `other` first, then self."""
        if self.degree != other.degree:
            raise ValueError(f"compose: degrees differ, {self.degree} vs {other.degree}")
        return Permutation(tuple(self.mapping[j] for j in other.mapping))

    def inverse(self) -> "Permutation":
        inv = [0] * self.degree
        for i, img in enumerate(self.mapping):
            inv[img] = i
        return Permutation(tuple(inv))

    def cycle_type(self) -> tuple[int, ...]:
        """Cycle lengths in decreasing order."""
        seen = [False] * self.degree
        lengths = []
        for start in range(self.degree):
            if seen[start]:
                continue
            n, i = 0, start
            while not seen[i]:
                seen[i] = True
                i = self.mapping[i]
                n += 1
            lengths.append(n)
        return tuple(sorted(lengths, reverse=True))


def identity(k: int) -> Permutation:
    if k < 1:
        raise ValueError(f"identity: degree must be >= 1, got {k}")
    return Permutation(tuple(range(k)))


def reversal(k: int) -> Permutation:
    """i -> k-1-i, the mirror of window positions."""
    if k < 1:
        raise ValueError(f"reversal: degree must be >= 1, got {k}")
    return Permutation(tuple(k - 1 - i for i in range(k)))


def shift(k: int, step: int) -> Permutation:
    """i -> (i + step) mod k, a cyclic shift of window positions."""
    if k < 1:
        raise ValueError(f"shift: degree must be >= 1, got {k}")
    return Permutation(tuple((i + step) % k for i in range(k)))


def permutation_matrix(p: Permutation) -> Matrix:
    """Orthogonal 0/1 matrix P with (P x)[i] = x[p^-1(i)] for row vectors x."""
    m = np.zeros((p.degree, p.degree), dtype=np.float64)
    for j, img in enumerate(p.mapping):
        m[img, j] = 1.0
    return m


def permute_rows(p: Permutation, x: Matrix) -> Matrix:
    """Apply the window action of p to x without forming the matrix."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != p.degree:
        raise ValueError(f"permute_rows: expected {p.degree} rows, got shape {x.shape}")
    inv = p.inverse().mapping
    return x[list(inv), :]


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group with a fixed permutation action on window positions.

    `cayley[i, j]` is the index of elements[i] * elements[j], where the product
    acts by applying element j first. `kind` names the abstract family and `n`
    its parameter; `degree` is the window size acted on, which for the mirror,
    shift and trivial families differs from the natural degree of the family.
    """

    kind: str
    n: int
    degree: int
    descriptor: str
    elements: tuple[Permutation, ...]
    cayley: np.ndarray
    inverse: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]
    identity_index: int

    @property
    def order(self) -> int:
        return len(self.elements)

    def element_matrices(self) -> list[Matrix]:
        return [permutation_matrix(p) for p in self.elements]


def _conjugacy_classes(cayley: np.ndarray, inverse: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    order = len(inverse)
    seen = [False] * order
    classes = []
    for x in range(order):
        if seen[x]:
            continue
        orbit = sorted({int(cayley[cayley[g, x], inverse[g]]) for g in range(order)})
        for y in orbit:
            seen[y] = True
        classes.append(tuple(orbit))
    return tuple(classes)


def _assemble(kind: str, n: int, degree: int, descriptor: str,
              elements: list[Permutation], cayley) -> FiniteGroup:
    cayley = np.asarray(cayley, dtype=np.int64)
    order = len(elements)
    if cayley.shape != (order, order):
        raise ValueError(f"cayley table shape {cayley.shape} does not match order {order}")
    identity_index = -1
    ref = np.arange(order)
    for e in range(order):
        if np.array_equal(cayley[e], ref) and np.array_equal(cayley[:, e], ref):
            identity_index = e
            break
    if identity_index < 0:
        raise ValueError("cayley table has no identity element")
    inverse = []
    for i in range(order):
        hits = np.where(cayley[i] == identity_index)[0]
        if len(hits) != 1 or cayley[hits[0], i] != identity_index:
            raise ValueError(f"element {i} has no unique two-sided inverse")
        inverse.append(int(hits[0]))
    inverse = tuple(inverse)
    classes = _conjugacy_classes(cayley, inverse)
    cayley.setflags(write=False)
    return FiniteGroup(kind=kind, n=n, degree=degree, descriptor=descriptor,
                       elements=tuple(elements), cayley=cayley, inverse=inverse,
                       classes=classes, identity_index=identity_index)


def cyclic_group(n: int) -> FiniteGroup:
    """Order n acting on an n-window by shifts; for n = 2 the non-identity
    element is exactly the index reversal."""
    if n < 1:
        raise ValueError(f"cyclic_group: n must be >= 1, got {n}")
    elements = [shift(n, m) for m in range(n)]
    cayley = [[(a + b) % n for b in range(n)] for a in range(n)]
    return _assemble("cyclic", n, n, f"cyclic:{n}", elements, cayley)


def shift_group(k: int, step: int) -> FiniteGroup:
    """Cyclic group of order k/step acting on a k-window, generated by
    shift-by-step. Requires step to divide k."""
    if k < 1:
        raise ValueError(f"shift_group: window must be >= 1, got {k}")
    if step < 1 or step > k or k % step != 0:
        raise ValueError(f"shift_group: step must divide the window size, got k={k} step={step}")
    n = k // step
    elements = [shift(k, m * step) for m in range(n)]
    cayley = [[(a + b) % n for b in range(n)] for a in range(n)]
    return _assemble("cyclic", n, k, f"shift:{k}:{step}", elements, cayley)


def trivial_group(k: int) -> FiniteGroup:
    """The one-element group on a k-window."""
    if k < 1:
        raise ValueError(f"trivial_group: window must be >= 1, got {k}")
    return _assemble("cyclic", 1, k, f"trivial:{k}", [identity(k)], [[0]])


def mirror_group(k: int) -> FiniteGroup:
    """Order-2 group on a k-window whose non-identity element reverses it."""
    if k < 2:
        raise ValueError(f"mirror_group: window must be >= 2, got {k}")
    elements = [identity(k), reversal(k)]
    return _assemble("cyclic", 2, k, f"mirror:{k}", elements, [[0, 1], [1, 0]])


def dihedral_group(n: int) -> FiniteGroup:
    """Order 2n acting on an n-window: rotations i -> i+m and reflections
    i -> m-i (mod n). For n <= 2 the action is not faithful; the abstract
    group still has order 2n."""
    if n < 1:
        raise ValueError(f"dihedral_group: n must be >= 1, got {n}")
    elements = [shift(n, m) for m in range(n)]
    elements += [Permutation(tuple((m - i) % n for i in range(n))) for m in range(n)]
    order = 2 * n

    def mult(i: int, j: int) -> int:
        # Element encoding: index m < n is rotation by m, index n+m reflects
        # through m. Products follow from composing the index maps.
        ti, a = (0, i) if i < n else (1, i - n)
        tj, b = (0, j) if j < n else (1, j - n)
        if ti == 0 and tj == 0:
            return (a + b) % n
        if ti == 0 and tj == 1:
            return n + (a + b) % n
        if ti == 1 and tj == 0:
            return n + (a - b) % n
        return (a - b) % n

    cayley = [[mult(i, j) for j in range(order)] for i in range(order)]
    return _assemble("dihedral", n, n, f"dihedral:{n}", elements, cayley)


def symmetric_group(k: int) -> FiniteGroup:
    """All permutations of a k-window, in lexicographic order. Capped at
    k = 5 (order 120); larger k is rejected as unsupported."""
    if k < 1:
        raise ValueError(f"symmetric_group: k must be >= 1, got {k}")
    if k > _MAX_SYMMETRIC:
        raise ValueError(f"symmetric_group: k = {k} is unsupported, the cap is {_MAX_SYMMETRIC}")
    mappings = list(itertools.permutations(range(k)))
    index = {m: i for i, m in enumerate(mappings)}
    elements = [Permutation(m) for m in mappings]
    order = len(elements)
    cayley = [[index[tuple(mappings[i][t] for t in mappings[j])] for j in range(order)]
              for i in range(order)]
    return _assemble("symmetric", k, k, f"symmetric:{k}", elements, cayley)


def from_permutations(perms, descriptor: str = "custom") -> FiniteGroup:
    """Build a custom group from an explicit list of distinct permutations.

    The list must be closed under composition; the table is found by lookup,
    so the action must be faithful (no duplicate permutations).
    """
    elements = [p if isinstance(p, Permutation) else Permutation(tuple(p)) for p in perms]
    if not elements:
        raise ValueError("from_permutations: empty element list")
    if len(elements) > _MAX_ORDER:
        raise ValueError(f"from_permutations: order {len(elements)} exceeds the cap {_MAX_ORDER}")
    degree = elements[0].degree
    index = {}
    for i, p in enumerate(elements):
        if p.degree != degree:
            raise ValueError("from_permutations: mixed degrees in element list")
        if p.mapping in index:
            raise ValueError(f"from_permutations: duplicate element {p.mapping!r}")
        index[p.mapping] = i
    order = len(elements)
    cayley = np.zeros((order, order), dtype=np.int64)
    for i in range(order):
        for j in range(order):
            prod = elements[i].compose(elements[j]).mapping
            if prod not in index:
                raise ValueError("from_permutations: element list is not closed under composition")
            cayley[i, j] = index[prod]
    return _assemble("custom", 0, degree, descriptor, elements, cayley)


def from_descriptor(desc: str) -> FiniteGroup:
    """Parse a group descriptor string.

    Grammar: cyclic:n, dihedral:n, symmetric:k, mirror:k, shift:k:step,
    trivial:k. Anything else is rejected.
    """
    parts = desc.strip().split(":")
    kind = parts[0]
    try:
        args = [int(p) for p in parts[1:]]
    except ValueError:
        raise ValueError(f"bad group descriptor {desc!r}: numeric parameters expected") from None
    makers = {"cyclic": (cyclic_group, 1), "dihedral": (dihedral_group, 1),
              "symmetric": (symmetric_group, 1), "mirror": (mirror_group, 1),
              "trivial": (trivial_group, 1), "shift": (shift_group, 2)}
    if kind not in makers:
        raise ValueError(f"bad group descriptor {desc!r}: unknown kind {kind!r}")
    maker, argc = makers[kind]
    if len(args) != argc:
        raise ValueError(f"bad group descriptor {desc!r}: {kind} takes {argc} parameter(s)")
    return maker(*args)


@dataclass(frozen=True)
class HomomorphismReport:
    pairs_checked: int
    violations: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_homomorphism(g: FiniteGroup) -> HomomorphismReport:
    """Check P(h1 h2) = P(h1) P(h2) for every pair, in exact integers."""
    if g.order > _MAX_ORDER:
        raise ValueError(f"verify_homomorphism: order {g.order} exceeds the cap {_MAX_ORDER}")
    mats = [permutation_matrix(p).astype(np.int64) for p in g.elements]
    violations = []
    for i in range(g.order):
        for j in range(g.order):
            if not np.array_equal(mats[i] @ mats[j], mats[g.cayley[i, j]]):
                violations.append((i, j))
    return HomomorphismReport(pairs_checked=g.order * g.order, violations=tuple(violations))


def save_group(g: FiniteGroup, path: str) -> None:
    """Write the group to a structured text file (descriptor and elements)."""
    lines = [f"group {g.descriptor}", f"kind {g.kind}", f"n {g.n}",
             f"degree {g.degree}", f"order {g.order}"]
    for p in g.elements:
        lines.append("elem " + " ".join(str(i) for i in p.mapping))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_group(path: str) -> FiniteGroup:
    """Rebuild a group saved by save_group, verifying the element list."""
    header: dict[str, str] = {}
    mappings: list[tuple[int, ...]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            key, _, rest = line.partition(" ")
            if key == "elem":
                mappings.append(tuple(int(t) for t in rest.split()))
            else:
                header[key] = rest
    if "group" not in header:
        raise ValueError(f"group file {path!r} has no descriptor line")
    desc = header["group"]
    if desc == "custom":
        return from_permutations(mappings)
    g = from_descriptor(desc)
    stored = [p.mapping for p in g.elements]
    if stored != mappings:
        raise ValueError(f"group file {path!r} does not match descriptor {desc!r}")
    return g

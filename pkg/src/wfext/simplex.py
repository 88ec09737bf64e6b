"""The closed simplex as a stratified space.

Faces are named by the allele labels that keep a positive frequency on
them. Every face carries a chart: the smallest label is the dependent
coordinate, eliminated through p^dep = 1 - sum of the others, and the
remaining labels are the free variables in ascending order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

import numpy as np

from wfext.errors import ArgumentError, RangeError

MAX_N = 12
FACE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Face:
    """An index set I_d of allele labels, naming the open subsimplex where
    exactly those alleles are present.

    :param indices: Allele labels, any order, no duplicates.
    :param ambient_n: The largest label of the ambient simplex. Defaults to max(indices).
    """

    indices: tuple[int, ...]
    ambient_n: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        labels = tuple(int(label) for label in self.indices)
        if not labels:
            raise ArgumentError("A face needs at least one allele label.")
        if len(set(labels)) != len(labels):
            raise ArgumentError(f"Face labels {list(labels)} contain duplicates.")
        ordered = tuple(sorted(labels))
        ambient_n = ordered[-1] if self.ambient_n is None else int(self.ambient_n)
        if ambient_n > MAX_N:
            raise RangeError(f"At most {MAX_N + 1} alleles are supported, got n = {ambient_n}.")
        if ordered[0] < 0 or ordered[-1] > ambient_n:
            raise ArgumentError(f"Face labels {list(ordered)} must lie in 0..{ambient_n}.")
        object.__setattr__(self, "indices", ordered)
        object.__setattr__(self, "ambient_n", ambient_n)

    @classmethod
    def full(cls, n: int) -> "Face":
        """The whole simplex over labels 0..n"""
        return cls(tuple(range(n + 1)), n)

    @property
    def dim(self) -> int:
        return len(self.indices) - 1

    @property
    def is_vertex(self) -> bool:
        return self.dim == 0

    @cached_property
    def chart(self) -> "Chart":
        return Chart(self)

    def __contains__(self, label: int) -> bool:
        return label in self.indices

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __str__(self) -> str:
        return "{" + ",".join(str(label) for label in self.indices) + "}"

    def issubset(self, other: "Face") -> bool:
        return set(self.indices) <= set(other.indices)

    def without(self, *labels: int) -> "Face":
        for label in labels:
            if label not in self.indices:
                raise ArgumentError(f"Label {label} is not part of face {self}.")
        return Face(tuple(i for i in self.indices if i not in labels), self.ambient_n)

    def union(self, labels: Iterable[int]) -> "Face":
        return Face(tuple(set(self.indices) | set(labels)), self.ambient_n)

    def to_json(self) -> list[int]:
        return list(self.indices)

    @classmethod
    def from_json(cls, labels: Sequence[int], n: Optional[int] = None) -> "Face":
        return cls(tuple(labels), n)


@dataclass(frozen=True)
class Chart:
    """Coordinates of a face with the smallest label eliminated"""

    face: Face

    @property
    def dependent_index(self) -> int:
        return self.face.indices[0]

    @property
    def free_labels(self) -> tuple[int, ...]:
        return self.face.indices[1:]

    @property
    def nvars(self) -> int:
        return self.face.dim

    def variable(self, label: int) -> Optional[int]:
        """Position of ``label`` among the free variables, None for the dependent label"""
        if label not in self.face.indices:
            raise ArgumentError(f"Label {label} is not part of face {self.face}.")
        if label == self.dependent_index:
            return None
        return self.free_labels.index(label)

    def values(self, point: "SimplexPoint") -> tuple[float, ...]:
        """Free-variable values of a point of the closed face"""
        if not point.face.issubset(self.face):
            raise ArgumentError(f"Point on face {point.face} does not lie on the closed face {self.face}.")
        return tuple(point.coordinate(label) for label in self.free_labels)

    def point(self, values: Sequence[float]) -> "SimplexPoint":
        """The point of the face with the given free-variable values"""
        if len(values) != self.nvars:
            raise ArgumentError(f"Face {self.face} has {self.nvars} free variables, got {len(values)} values.")
        dependent = 1.0 - math.fsum(values)
        return SimplexPoint(self.face, (dependent, *values))


@dataclass(frozen=True)
class SimplexPoint:
    """Frequencies on a closed face, listed in face-index order"""

    face: Face
    coords: tuple[float, ...]

    def __post_init__(self):
        coords = tuple(float(c) for c in self.coords)
        if len(coords) != len(self.face.indices):
            raise ArgumentError(
                f"Face {self.face} needs {len(self.face.indices)} coordinates, got {len(coords)}."
            )
        if any(c < -FACE_TOLERANCE for c in coords):
            raise ArgumentError(f"Coordinates {list(coords)} must be nonnegative.")
        if abs(math.fsum(coords) - 1.0) > FACE_TOLERANCE:
            raise ArgumentError(f"Coordinates {list(coords)} must sum to 1.")
        object.__setattr__(self, "coords", tuple(max(c, 0.0) for c in coords))

    @classmethod
    def from_mapping(cls, values: Mapping[int, float], n: Optional[int] = None) -> "SimplexPoint":
        face = Face(tuple(values), n)
        return cls(face, tuple(values[label] for label in face.indices))

    @classmethod
    def barycenter(cls, face: Face) -> "SimplexPoint":
        weight = 1.0 / len(face.indices)
        return cls(face, tuple(weight for _ in face.indices))

    @classmethod
    def vertex(cls, label: int, n: Optional[int] = None) -> "SimplexPoint":
        return cls(Face((label,), n), (1.0,))

    def coordinate(self, label: int) -> float:
        """Frequency of ``label``; labels outside the face have frequency 0"""
        try:
            return self.coords[self.face.indices.index(label)]
        except ValueError:
            return 0.0

    def as_mapping(self) -> dict[int, float]:
        return dict(zip(self.face.indices, self.coords))

    def is_interior(self) -> bool:
        return all(c > FACE_TOLERANCE for c in self.coords)

    def classify(self) -> "SimplexPoint":
        """The same point on the face it actually lies in"""
        kept = [(label, c) for label, c in zip(self.face.indices, self.coords) if c > FACE_TOLERANCE]
        if len(kept) == len(self.coords):
            return self
        face = Face(tuple(label for label, _ in kept), self.face.ambient_n)
        total = math.fsum(c for _, c in kept)
        return SimplexPoint(face, tuple(c / total for _, c in kept))

    def to_json(self) -> dict:
        return {"face": self.face.to_json(), "coords": list(self.coords)}

    @classmethod
    def from_json(cls, document: Mapping, n: Optional[int] = None) -> "SimplexPoint":
        return cls(Face.from_json(document["face"], n), tuple(document["coords"]))


@dataclass(frozen=True)
class Projection:
    """Linear projection of ``domain`` onto ``domain`` minus ``absorbed``.

    The frequencies of the absorbed labels are added onto ``anchor``; all
    other labels keep their value. A single absorbed label gives the
    two-label projection, a chain of labels the path projection.
    """

    domain: Face
    anchor: int
    absorbed: tuple[int, ...]

    def __post_init__(self):
        absorbed = tuple(int(label) for label in self.absorbed)
        object.__setattr__(self, "absorbed", absorbed)
        if self.anchor not in self.domain:
            raise ArgumentError(f"Anchor {self.anchor} is not part of face {self.domain}.")
        if self.anchor in absorbed or len(set(absorbed)) != len(absorbed):
            raise ArgumentError(f"Absorbed labels {list(absorbed)} must be distinct from anchor {self.anchor}.")
        for label in absorbed:
            if label not in self.domain:
                raise ArgumentError(f"Absorbed label {label} is not part of face {self.domain}.")

    @cached_property
    def target(self) -> Face:
        return self.domain.without(*self.absorbed)

    def apply(self, point: SimplexPoint) -> SimplexPoint:
        if point.face != self.domain:
            raise ArgumentError(f"Point on face {point.face} does not match projection domain {self.domain}.")
        # accumulate right to left so a chain equals the fold of two-label steps
        mass = 0.0
        for label in reversed(self.absorbed):
            mass = point.coordinate(label) + mass
        anchor_value = point.coordinate(self.anchor) + mass if self.absorbed else point.coordinate(self.anchor)
        coords = tuple(
            anchor_value if label == self.anchor else point.coordinate(label) for label in self.target.indices
        )
        return SimplexPoint(self.target, coords)


@dataclass(frozen=True)
class PathSpec:
    """An extension path: base face, anchor i_k and the labels i_{k+1}..i_n added in order"""

    base: Face
    anchor: int
    added: tuple[int, ...]

    def __post_init__(self):
        added = tuple(int(label) for label in self.added)
        object.__setattr__(self, "added", added)
        if self.anchor not in self.base:
            raise ArgumentError(f"Anchor {self.anchor} is not part of base face {self.base}.")
        if len(set(added)) != len(added):
            raise ArgumentError(f"Path labels {list(added)} contain duplicates.")
        for label in added:
            if label in self.base:
                raise ArgumentError(f"Path label {label} already belongs to base face {self.base}.")
            if label > self.base.ambient_n:
                raise ArgumentError(f"Path label {label} exceeds n = {self.base.ambient_n}.")

    @property
    def top(self) -> Face:
        return self.base.union(self.added)

    @property
    def sequence(self) -> tuple[int, ...]:
        """The labels i_k, i_{k+1}, ..., i_n"""
        return (self.anchor, *self.added)

    def chain(self) -> list[Face]:
        """Ascending faces I_k, I_{k+1}, ..., I_n"""
        return [self.base.union(self.added[:j]) for j in range(len(self.added) + 1)]

    def truncated(self, d: int) -> "PathSpec":
        """The path up to dimension d"""
        k = self.base.dim
        if not k <= d <= k + len(self.added):
            raise RangeError(f"Dimension {d} is outside the path range {k}..{k + len(self.added)}.")
        return PathSpec(self.base, self.anchor, self.added[: d - k])

    def projection(self, d: Optional[int] = None) -> Projection:
        """Projection of the dimension-d chain face onto the base"""
        path = self if d is None else self.truncated(d)
        return Projection(path.top, path.anchor, path.added)


def boundary_faces(face: Face, k: int) -> list[Face]:
    """All k-dimensional faces of ``face``; for k = face.dim the face itself"""
    if not 0 <= k <= face.dim:
        raise RangeError(f"Boundary dimension {k} is outside 0..{face.dim} for face {face}.")
    return [Face(labels, face.ambient_n) for labels in itertools.combinations(face.indices, k + 1)]


def all_faces(n: int) -> list[Face]:
    """The face lattice of the n-simplex, dimension-ascending"""
    simplex = Face.full(n)
    return [face for k in range(n + 1) for face in boundary_faces(simplex, k)]


def superfaces(base: Face, n: Optional[int] = None) -> list[Face]:
    """Faces of the n-simplex containing ``base``, dimension-ascending"""
    n = base.ambient_n if n is None else n
    base = Face(base.indices, n)
    rest = [label for label in range(n + 1) if label not in base]
    return [
        base.union(extra) if extra else base
        for size in range(len(rest) + 1)
        for extra in itertools.combinations(rest, size)
    ]


def project_rs(point: SimplexPoint, r: int, s: int) -> SimplexPoint:
    """Move the frequency of allele s onto allele r"""
    if r == s:
        raise ArgumentError(f"Projection labels must differ, got r = s = {r}.")
    return Projection(point.face, r, (s,)).apply(point)


def project_chain(point: SimplexPoint, path: PathSpec) -> SimplexPoint:
    """Move the frequencies of all labels added along ``path`` onto its anchor"""
    d = point.face.dim
    try:
        projection = path.projection(d)
    except RangeError as exc:
        raise ArgumentError(str(exc)) from exc
    return projection.apply(point)


def sample_interior(face: Face, rng: np.random.Generator) -> SimplexPoint:
    """Uniform (flat Dirichlet) sample from the open face"""
    if face.is_vertex:
        return SimplexPoint(face, (1.0,))
    while True:
        coords = rng.dirichlet(np.ones(len(face.indices)))
        if np.all(coords > FACE_TOLERANCE):
            return SimplexPoint(face, tuple(float(c) for c in coords))

"""
Support complexes of sign patterns and their reduced homology over Q.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from fan import Fan
from lattice import convolve, rank

Face = tuple[int, ...]


@dataclass(frozen=True)
class SupportComplex:
    """Cones of a fan whose rays all lie in `vertices`; the empty face is always present."""
    rank: int
    vertices: frozenset[int]
    faces: tuple[Face, ...]

    def faces_of_size(self, size: int) -> list[Face]:
        return [face for face in self.faces if len(face) == size]

    @property
    def is_empty(self) -> bool:
        return not self.vertices


@dataclass(frozen=True)
class HomologyProfile:
    # dims[q + 1] is the dimension in degree q, for q = -1 .. rank - 1
    dims: tuple[int, ...]

    def __getitem__(self, degree: int) -> int:
        index = degree + 1
        if 0 <= index < len(self.dims):
            return self.dims[index]
        return 0

    @property
    def top_degree(self) -> int:
        return len(self.dims) - 2

    @property
    def is_zero(self) -> bool:
        return not any(self.dims)

    def as_dict(self) -> dict[int, int]:
        return {q - 1: d for q, d in enumerate(self.dims)}


def support_complex(fan: Fan, nonneg_rays: Iterable[int]) -> SupportComplex:
    vertices = frozenset(nonneg_rays) & frozenset(range(fan.n_rays))
    faces = sorted(
        (tuple(sorted(cone)) for cone in fan.cones if cone <= vertices),
        key=lambda face: (len(face), face),
    )
    return SupportComplex(fan.rank, vertices, tuple(faces))


def boundary_matrix(complex_: SupportComplex, size: int) -> list[list[int]]:
    """
    Matrix of the boundary from faces with `size` vertices to faces with one fewer.

    size == 1 gives the augmentation onto the empty face.
    """
    targets = {face: row for row, face in enumerate(complex_.faces_of_size(size - 1))}
    sources = complex_.faces_of_size(size)
    matrix = [[0] * len(sources) for _ in targets]
    for col, face in enumerate(sources):
        for i in range(len(face)):
            matrix[targets[face[:i] + face[i + 1:]]][col] = -1 if i % 2 else 1
    return matrix


def reduced_homology(complex_: SupportComplex) -> HomologyProfile:
    n = complex_.rank
    # sizes 0..n correspond to degrees -1..n-1
    counts = [len(complex_.faces_of_size(size)) for size in range(n + 1)]
    ranks = [0] * (n + 2)
    for size in range(1, n + 1):
        if counts[size] and counts[size - 1]:
            ranks[size] = rank(boundary_matrix(complex_, size))
    dims = tuple(counts[size] - ranks[size] - ranks[size + 1] for size in range(n + 1))
    return HomologyProfile(dims)


def reduced_euler_characteristic(complex_: SupportComplex) -> int:
    """Sum over faces of (-1)^dim, the empty face counting in degree -1."""
    return sum((-1) ** (len(face) - 1) for face in complex_.faces)


def join_homology(first: HomologyProfile, second: HomologyProfile) -> HomologyProfile:
    """
    Reduced homology of the join of two complexes over a field.

    H_k(A * B) is the sum of H_p(A) (x) H_q(B) over p + q = k - 1; with the
    degree -1 offset of `dims` this is a plain convolution.
    """
    return HomologyProfile(convolve(first.dims, second.dims))


def sphere_profile(n: int) -> HomologyProfile:
    return HomologyProfile(tuple(1 if q == n - 1 else 0 for q in range(-1, n)))


def all_patterns(n_rays: int) -> Iterable[frozenset[int]]:
    for size in range(n_rays + 1):
        for subset in combinations(range(n_rays), size):
            yield frozenset(subset)

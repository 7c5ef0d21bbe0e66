"""
Exact integer and rational linear algebra.

Ranks by fraction-free elimination, integer solving, and lattice-point
enumeration in rational polyhedra given by inequalities. Feasibility and
coordinate bounds come from Fourier-Motzkin elimination over Fractions, so no
floating point ever enters a lattice computation.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import NamedTuple, Sequence

from sympy import Matrix

from errors import NonUniqueSolutionError

logger = logging.getLogger(__name__)

IntVector = tuple[int, ...]
IntMatrix = tuple[IntVector, ...]


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def transpose(rows: Sequence[Sequence[int]]) -> IntMatrix:
    return tuple(tuple(column) for column in zip(*rows))


def mat_vec(rows: Sequence[Sequence[int]], v: Sequence[int]) -> IntVector:
    return tuple(dot(row, v) for row in rows)


def convolve(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Coefficient list of the product of two polynomials."""
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def rank(rows: Sequence[Sequence[int]]) -> int:
    """
    Rank over the rationals by Bareiss fraction-free elimination.

    Every intermediate entry is a minor of the input, so the division by the
    previous pivot is exact and entries stay integers.
    """
    work = [list(row) for row in rows if any(row)]
    if not work:
        return 0
    n_cols = len(work[0])
    pivot_row = 0
    previous = 1
    for col in range(n_cols):
        found = next((i for i in range(pivot_row, len(work)) if work[i][col] != 0), None)
        if found is None:
            continue
        work[pivot_row], work[found] = work[found], work[pivot_row]
        pivot = work[pivot_row][col]
        for i in range(pivot_row + 1, len(work)):
            factor = work[i][col]
            work[i] = [
                (pivot * work[i][j] - factor * work[pivot_row][j]) // previous
                for j in range(n_cols)
            ]
        previous = pivot
        pivot_row += 1
        if pivot_row == len(work):
            break
    return pivot_row


def determinant(rows: Sequence[Sequence[int]]) -> int:
    return int(Matrix(rows).det(method='bareiss'))


def unimodular_inverse(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """Integer inverse of a square matrix with determinant +-1."""
    matrix = Matrix(rows)
    det = matrix.det(method='bareiss')
    if det not in (1, -1):
        raise ValueError(f"matrix is not unimodular (determinant {det})")
    inverse = matrix.inv()
    return tuple(tuple(int(entry) for entry in row) for row in inverse.tolist())


def solve_integer(A: Sequence[Sequence[int]], b: Sequence[int]) -> IntVector | None:
    """
    Unique integer solution of A x = b, or None when no integer solution exists.

    Raises NonUniqueSolutionError when the rational solution space has free
    parameters.
    """
    try:
        solution, params = Matrix(A).gauss_jordan_solve(Matrix(list(b)))
    except ValueError:
        return None
    if len(params) > 0:
        raise NonUniqueSolutionError(
            f"system has {len(params)} free parameter(s); a unique solution was expected"
        )
    values = list(solution)
    if not all(value.is_integer for value in values):
        return None
    return tuple(int(value) for value in values)


class Inequality(NamedTuple):
    """The half-space <normal, x> <= bound."""
    normal: IntVector
    bound: int

    @classmethod
    def at_most(cls, normal, bound, strict=False):
        # over the integers <n, x> < b is <n, x> <= b - 1
        return cls(tuple(normal), bound - 1 if strict else bound)

    @classmethod
    def at_least(cls, normal, bound, strict=False):
        bound = bound + 1 if strict else bound
        return cls(tuple(-c for c in normal), -bound)


@dataclass(frozen=True)
class RationalPolyhedron:
    dim: int
    inequalities: tuple[Inequality, ...]

    def __post_init__(self):
        for inequality in self.inequalities:
            if len(inequality.normal) != self.dim:
                raise ValueError(
                    f"normal {inequality.normal} does not have ambient dimension {self.dim}"
                )

    def contains(self, point: Sequence[int]) -> bool:
        return all(dot(ineq.normal, point) <= ineq.bound for ineq in self.inequalities)


class Unbounded:
    """Marker returned by lattice_points for regions with a recession direction."""

    def __repr__(self):
        return 'UNBOUNDED'


UNBOUNDED = Unbounded()

_Row = tuple[tuple[Fraction, ...], Fraction]
_INFEASIBLE = None


def _to_rows(inequalities) -> list[_Row]:
    return [
        (tuple(Fraction(c) for c in ineq.normal), Fraction(ineq.bound))
        for ineq in inequalities
    ]


def _normalized(row: _Row) -> _Row:
    coeffs, bound = row
    scale = max((abs(c) for c in coeffs), default=0)
    if scale == 0:
        return row
    return tuple(c / scale for c in coeffs), bound / scale


def _prune(rows) -> list[_Row] | None:
    """Drop trivial and duplicate rows; None when a row reads 0 <= negative."""
    seen = {}
    for row in rows:
        coeffs, bound = _normalized(row)
        if not any(coeffs):
            if bound < 0:
                return _INFEASIBLE
            continue
        # keep the tightest bound for each direction
        if coeffs not in seen or bound < seen[coeffs]:
            seen[coeffs] = bound
    return list(seen.items())


def _eliminate(rows: list[_Row], var: int) -> list[_Row] | None:
    keep, upper, lower = [], [], []
    for coeffs, bound in rows:
        c = coeffs[var]
        if c > 0:
            upper.append((coeffs, bound))
        elif c < 0:
            lower.append((coeffs, bound))
        else:
            keep.append((coeffs, bound))
    for up_coeffs, up_bound in upper:
        a = up_coeffs[var]
        for low_coeffs, low_bound in lower:
            b = -low_coeffs[var]
            combined = tuple(x / a + y / b for x, y in zip(up_coeffs, low_coeffs))
            keep.append((combined, up_bound / a + low_bound / b))
    return _prune(keep)


def _is_feasible_rows(rows: list[_Row] | None, dim: int) -> bool:
    rows = _prune(rows) if rows is not None else _INFEASIBLE
    for var in range(dim):
        if rows is _INFEASIBLE:
            return False
        rows = _eliminate(rows, var)
    return rows is not _INFEASIBLE


def is_feasible(inequalities: Sequence[Inequality], dim: int) -> bool:
    """Rational feasibility of a system of non-strict inequalities."""
    return _is_feasible_rows(_to_rows(inequalities), dim)


def has_trivial_recession_cone(P: RationalPolyhedron) -> bool:
    """
    True iff {d : <normal, d> <= 0 for every inequality} is {0}.

    A non-zero recession direction has some coordinate of absolute value at
    least 1 after scaling, so it suffices to test the 2 * dim systems with
    +-d_i >= 1 added.
    """
    homogeneous = [(tuple(Fraction(c) for c in ineq.normal), Fraction(0))
                   for ineq in P.inequalities]
    for i in range(P.dim):
        for sign in (1, -1):
            pin = tuple(Fraction(-sign) if k == i else Fraction(0) for k in range(P.dim))
            if _is_feasible_rows(homogeneous + [(pin, Fraction(-1))], P.dim):
                return False
    return True


def _variable_bounds(rows: list[_Row], var: int, dim: int):
    """Exact range of coordinate var over the projection; None when empty."""
    projected = _prune(rows)
    for other in range(var + 1, dim):
        if projected is _INFEASIBLE:
            return None
        projected = _eliminate(projected, other)
    if projected is _INFEASIBLE:
        return None
    low, high = None, None
    for coeffs, bound in projected:
        c = coeffs[var]
        if c > 0:
            value = bound / c
            high = value if high is None else min(high, value)
        elif c < 0:
            value = bound / c
            low = value if low is None else max(low, value)
    return low, high


def _substitute(rows: list[_Row], var: int, value: int) -> list[_Row]:
    out = []
    for coeffs, bound in rows:
        c = coeffs[var]
        if c == 0:
            out.append((coeffs, bound))
            continue
        fixed = coeffs[:var] + (Fraction(0),) + coeffs[var + 1:]
        out.append((fixed, bound - c * value))
    return out


def _descend(rows, dim, var, prefix, out):
    if var == dim:
        out.append(tuple(prefix))
        return
    bounds = _variable_bounds(rows, var, dim)
    if bounds is None:
        return
    low, high = bounds
    if low is None or high is None:
        raise ValueError(f"coordinate {var} is unbounded; check the recession cone first")
    for value in range(ceil(low), floor(high) + 1):
        _descend(_substitute(rows, var, value), dim, var + 1, prefix + [value], out)


def enumerate_lattice_points(P: RationalPolyhedron) -> list[IntVector]:
    """
    Integer points of a bounded polyhedron by recursive coordinate-bound descent.

    The caller guarantees boundedness (see has_trivial_recession_cone).
    """
    out: list[IntVector] = []
    rows = _prune(_to_rows(P.inequalities))
    if rows is _INFEASIBLE:
        return out
    _descend(rows, P.dim, 0, [], out)
    return out


def lattice_points(P: RationalPolyhedron) -> list[IntVector] | Unbounded:
    if not has_trivial_recession_cone(P):
        logger.debug("Polyhedron in dimension %d has a recession direction", P.dim)
        return UNBOUNDED
    return enumerate_lattice_points(P)

"""Perturbed cochain complexes of the permutohedron.

Faces of the permutohedron P_n are ordered set partitions [I_1, ..., I_p]
of {1..n}, of dimension n - p. The perturbed differential sends a face to
each face obtained by merging two adjacent blocks, weighted by the product
of kernel entries lambda_ij over the merged pair and by the bar sign
(-1)^(nu-1) for merging blocks nu and nu+1 (1-based).

Indices are 1-based everywhere in this module, matching the usual way the
matrix entries lambda_ij are written.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import DomainError, IllConditionedError, NotCofaceError, RenumberError

__all__ = [
    "OrderedSetPartition",
    "PerturbedMatrix",
    "PerturbedComplex",
    "faces",
    "face_counts",
    "coface_weight",
    "build_complex",
    "detect_wheels",
    "matrix_rank",
    "cohomology_dims",
    "euler_characteristic",
    "depth",
    "depth_filtration",
    "subcomplex_cohomology",
    "random_wheel_free_matrix",
    "cubic_relation_scan",
    "MAX_N",
]

MAX_N = 6


@dataclass(frozen=True)
class OrderedSetPartition:
    """An ordered sequence of disjoint nonempty blocks covering {1..n}."""

    blocks: tuple

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if any(not b for b in blocks):
            raise DomainError("blocks must be nonempty")
        union = frozenset().union(*blocks) if blocks else frozenset()
        if sum(len(b) for b in blocks) != len(union):
            raise DomainError("blocks must be disjoint")
        if union != frozenset(range(1, len(union) + 1)):
            raise DomainError("blocks must cover {1..n}")

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def dimension(self) -> int:
        return self.n - len(self.blocks)

    def merge(self, nu: int) -> "OrderedSetPartition":
        """Merge blocks nu and nu+1 (1-based)."""
        if not 1 <= nu < len(self.blocks):
            raise DomainError(f"no adjacent pair at position {nu}")
        b = self.blocks
        return OrderedSetPartition(b[: nu - 1] + (b[nu - 1] | b[nu],) + b[nu + 1:])

    def vertices(self):
        """Permutations (as orderings of 1..n) that are vertices of this face."""
        for parts in itertools.product(*(itertools.permutations(sorted(b)) for b in self.blocks)):
            yield tuple(i for part in parts for i in part)

    def __str__(self) -> str:
        return "[" + ", ".join("{" + ",".join(map(str, sorted(b))) + "}" for b in self.blocks) + "]"


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_N:
        raise DomainError(f"n must lie in 1..{MAX_N}, got {n}")


@lru_cache(maxsize=None)
def _faces_cached(n: int) -> tuple:
    graded = [[] for _ in range(n)]
    # assign each element a block label 0..p-1 and keep surjective labellings
    for p in range(1, n + 1):
        for labels in itertools.product(range(p), repeat=n):
            if len(set(labels)) != p:
                continue
            blocks = [set() for _ in range(p)]
            for elem, lab in enumerate(labels, start=1):
                blocks[lab].add(elem)
            graded[n - p].append(OrderedSetPartition(tuple(blocks)))
    for level in graded:
        level.sort(key=lambda f: tuple(tuple(sorted(b)) for b in f.blocks))
    return tuple(tuple(level) for level in graded)


def faces(n: int) -> list:
    """All faces of P_n, as a list indexed by dimension 0..n-1."""
    _check_n(n)
    return [list(level) for level in _faces_cached(n)]


def face_counts(n: int) -> tuple:
    return tuple(len(level) for level in faces(n))


@dataclass
class PerturbedMatrix:
    """Off-diagonal entries lambda_ij with a mask of entries declared exactly zero.

    ``values`` is an n x n array (complex, or object holding Fractions in
    exact mode); its diagonal is ignored.
    """

    values: np.ndarray
    zero_mask: np.ndarray = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=object if self._exact_input() else complex)
        n = vals.shape[0]
        if vals.shape != (n, n):
            raise DomainError("lambda must be square")
        _check_n(n)
        mask = np.zeros((n, n), dtype=bool) if self.zero_mask is None else np.array(self.zero_mask, dtype=bool)
        np.fill_diagonal(mask, False)
        zero = Fraction(0) if vals.dtype == object else 0j
        vals[mask] = zero
        self.values, self.zero_mask = vals, mask

    def _exact_input(self) -> bool:
        arr = np.asarray(self.values)
        return arr.dtype == object and all(isinstance(v, (Fraction, int)) for v in arr.flat)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    def entry(self, i: int, j: int):
        return self.values[i - 1, j - 1]

    @classmethod
    def from_values(cls, values, zero_tol: float = 0.0):
        """Mask every off-diagonal entry with modulus at most ``zero_tol``."""
        vals = np.asarray(values)
        mask = np.abs(vals.astype(complex)) <= zero_tol
        return cls(vals, mask)

    @classmethod
    def ones(cls, n: int, exact: bool = False):
        one = Fraction(1) if exact else 1.0
        return cls(np.full((n, n), one, dtype=object if exact else complex))


def coface_weight(F: OrderedSetPartition, F_prime: OrderedSetPartition, L: PerturbedMatrix):
    """Weight lambda_{F F'} for F' obtained from F by merging two adjacent blocks.

    Returns the pair (weight, nu) where nu is the 1-based position of the
    first merged block; the weight is the product of lambda_{i'i''} over
    i' in the earlier block and i'' in the later one.
    """
    fb, gb = F.blocks, F_prime.blocks
    if F.n != F_prime.n or len(fb) != len(gb) + 1:
        raise NotCofaceError(f"{F_prime} is not a codimension-one coface of {F}")
    for nu in range(1, len(fb)):
        if fb[: nu - 1] == gb[: nu - 1] and fb[nu + 1:] == gb[nu:] and (fb[nu - 1] | fb[nu]) == gb[nu - 1]:
            return _block_weight(fb[nu - 1], fb[nu], L), nu
    raise NotCofaceError(f"{F_prime} is not obtained from {F} by merging adjacent blocks")


def _block_weight(first, second, L: PerturbedMatrix):
    w = Fraction(1) if L.exact else 1.0 + 0j
    for i in sorted(first):
        for j in sorted(second):
            w = w * L.entry(i, j)
    return w


@dataclass
class PerturbedComplex:
    """Graded face bases and differentials D_m : C^m -> C^(m+1).

    ``differentials[m]`` has shape (#faces of dim m+1, #faces of dim m).
    """

    n: int
    bases: list
    differentials: list
    exact: bool
    d_squared_defect: float = 0.0
    matrix: PerturbedMatrix = field(default=None, repr=False)

    @property
    def dims(self) -> tuple:
        return tuple(len(b) for b in self.bases)


def build_complex(L: PerturbedMatrix, check: bool = True) -> PerturbedComplex:
    """Assemble (C^*(P_n), d_L) and verify that d o d vanishes."""
    n = L.n
    bases = faces(n)
    index = [{f: k for k, f in enumerate(level)} for level in bases]
    dtype = object if L.exact else complex
    zero = Fraction(0) if L.exact else 0j
    diffs = []
    for m in range(n - 1):
        D = np.full((len(bases[m + 1]), len(bases[m])), zero, dtype=dtype)
        for col, F in enumerate(bases[m]):
            for nu in range(1, len(F.blocks)):
                G = F.merge(nu)
                sign = 1 if nu % 2 == 1 else -1
                D[index[m + 1][G], col] += sign * _block_weight(F.blocks[nu - 1], F.blocks[nu], L)
        diffs.append(D)
    cx = PerturbedComplex(n, bases, diffs, L.exact, matrix=L)
    if check:
        worst = 0.0
        for a, b in zip(diffs, diffs[1:]):
            prod = b.dot(a)
            if L.exact:
                if any(v != 0 for v in prod.flat):
                    raise AssertionError("d o d is not zero in exact mode")
            else:
                scale = max(1.0, float(np.abs(a).max()) * float(np.abs(b).max()))
                worst = max(worst, float(np.abs(prod).max()) / scale if prod.size else 0.0)
        cx.d_squared_defect = worst
    return cx


def detect_wheels(L) -> list:
    """All simple directed cycles i_1 -> ... -> i_m -> i_1 with every lambda on the way masked.

    Each cycle is returned once, rotated to start at its smallest index.
    Accepts a PerturbedMatrix or a boolean n x n mask.
    """
    mask = L.zero_mask if isinstance(L, PerturbedMatrix) else np.asarray(L, dtype=bool)
    n = mask.shape[0]
    succ = {i: [j for j in range(n) if j != i and mask[i, j]] for i in range(n)}
    cycles = []

    def walk(start, path, seen):
        for j in succ[path[-1]]:
            if j == start:
                cycles.append(tuple(k + 1 for k in path))
            elif j > start and j not in seen:
                walk(start, path + [j], seen | {j})

    for start in range(n):
        walk(start, [start], {start})
    return sorted(cycles, key=lambda c: (len(c), c))


# ----------------------------------------------------------------- ranks


def _exact_rank(M) -> int:
    rows = [list(r) for r in M]
    if not rows or not rows[0]:
        return 0
    rank, ncols = 0, len(rows[0])
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][c]
        for r in range(rank + 1, len(rows)):
            if rows[r][c] != 0:
                f = rows[r][c] / p
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def _equilibrate(M: np.ndarray) -> np.ndarray:
    """Scale rows, then columns, to unit max-modulus; rank is unchanged."""
    A = np.array(M, dtype=complex)
    for axis in (1, 0):
        norms = np.abs(A).max(axis=axis, keepdims=True)
        norms[norms == 0] = 1.0
        A = A / norms
    return A


def matrix_rank(M, rank_tol: float = 1e-8, cluster: float = 10.0) -> dict:
    """Numerical rank with singular-value diagnostics.

    Singular values below ``rank_tol`` times the largest one are dropped.
    The gap is the smallest kept value over the largest dropped one; when
    nothing is dropped the dropped side is the rounding floor
    n * eps * sigma_max. Values within a factor ``cluster`` of the
    threshold make the rank ambiguous, and IllConditionedError is raised.
    """
    M = np.asarray(M)
    if M.size == 0:
        return {"rank": 0, "gap": math.inf, "singular_values": []}
    if M.dtype == object:
        return {"rank": _exact_rank(M), "gap": math.inf, "singular_values": None}
    sv = np.linalg.svd(_equilibrate(M), compute_uv=False)
    top = float(sv[0]) if sv.size else 0.0
    if top == 0.0:
        return {"rank": 0, "gap": math.inf, "singular_values": sv.tolist()}
    rel = sv / top
    near = (rel > rank_tol / cluster) & (rel < rank_tol * cluster)
    if np.any(near):
        raise IllConditionedError(
            f"singular values {rel[near].tolist()} sit within a factor {cluster} of rank_tol {rank_tol}")
    kept = rel >= rank_tol
    rank = int(kept.sum())
    floor = max(M.shape) * np.finfo(float).eps
    dropped = float(rel[~kept].max()) if rank < rel.size else 0.0
    gap = float(rel[rank - 1]) / max(dropped, floor) if rank else math.inf
    return {"rank": rank, "gap": gap, "singular_values": sv.tolist()}


def cohomology_dims(C: PerturbedComplex, rank_tol: float = 1e-8, details: bool = False):
    """dim H^m = dim C^m - rank D_m - rank D_(m-1), for m = 0..n-1."""
    infos = [matrix_rank(D, rank_tol) for D in C.differentials]
    ranks = [i["rank"] for i in infos]
    dims = []
    for m, size in enumerate(C.dims):
        r_out = ranks[m] if m < len(ranks) else 0
        r_in = ranks[m - 1] if m >= 1 else 0
        dims.append(size - r_out - r_in)
    dims = tuple(dims)
    if not details:
        return dims
    return {"dims": dims, "ranks": ranks, "gaps": [i["gap"] for i in infos],
            "euler_ok": euler_characteristic(dims) == euler_characteristic(C.dims)}


def euler_characteristic(dims) -> int:
    return sum((-1) ** m * d for m, d in enumerate(dims))


# ----------------------------------------------------------------- depth


def depth(F: OrderedSetPartition, Z) -> int:
    """Number of pairs (i, j) in Z with i in an earlier block than j."""
    where = {i: k for k, b in enumerate(F.blocks) for i in b}
    return sum(1 for i, j in Z if where[i] < where[j])


def _topological_order(Z, n: int) -> list:
    indeg = {i: 0 for i in range(1, n + 1)}
    succ = {i: [] for i in range(1, n + 1)}
    for i, j in Z:
        succ[i].append(j)
        indeg[j] += 1
    ready = sorted(i for i in indeg if indeg[i] == 0)
    order = []
    while ready:
        i = ready.pop(0)
        order.append(i)
        for j in succ[i]:
            indeg[j] -= 1
            if indeg[j] == 0:
                ready.append(j)
        ready.sort()
    if len(order) < n:
        raise RenumberError("the zero pattern contains a wheel, so no renumbering puts it above the diagonal")
    return order


def depth_filtration(Z, n: int) -> list:
    """Face sets P^(r) = {F : dpt(F) >= r}, for r = 0 .. |Z|; empty sets are kept.

    Each set is closed under passing to subfaces, since refining a face can
    only raise its depth.
    """
    _check_n(n)
    Z = [tuple(p) for p in Z]
    for i, j in Z:
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise DomainError(f"bad pair {(i, j)}")
    _topological_order(Z, n)
    all_faces = [f for level in faces(n) for f in level]
    depths = {f: depth(f, Z) for f in all_faces}
    return [{f for f in all_faces if depths[f] >= r} for r in range(len(Z) + 1)]


def subcomplex_cohomology(face_set, n: int) -> tuple:
    """Cohomology dims of the ordinary cochain complex of a subcomplex of P_n (exact)."""
    if not face_set:
        return ()
    bases = [[f for f in level if f in face_set] for level in faces(n)]
    index = [{f: k for k, f in enumerate(level)} for level in bases]
    ranks = []
    for m in range(n - 1):
        D = np.full((len(bases[m + 1]), len(bases[m])), Fraction(0), dtype=object)
        for col, F in enumerate(bases[m]):
            for nu in range(1, len(F.blocks)):
                G = F.merge(nu)
                if G in index[m + 1]:
                    D[index[m + 1][G], col] += 1 if nu % 2 == 1 else -1
        ranks.append(_exact_rank(D) if D.size else 0)
    dims = []
    for m, level in enumerate(bases):
        dims.append(len(level) - (ranks[m] if m < len(ranks) else 0) - (ranks[m - 1] if m else 0))
    while dims and dims[-1] == 0 and not bases[len(dims) - 1]:
        dims.pop()
    return tuple(dims)


# ----------------------------------------------------------------- sampling


def random_wheel_free_matrix(n: int, rng: np.random.Generator, zero_fraction: float = 0.3,
                             radii=(0.5, 2.0), exact: bool = False) -> PerturbedMatrix:
    """Random lambda with entries in an annulus and a random acyclic zero pattern.

    Zeros are placed only on pairs (i, j) that go forward in a random
    ordering of the indices, which rules out wheels.
    """
    order = rng.permutation(n) + 1
    pos = {int(v): k for k, v in enumerate(order)}
    mask = np.zeros((n, n), dtype=bool)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j and pos[i] < pos[j] and rng.random() < zero_fraction:
                mask[i - 1, j - 1] = True
    if exact:
        vals = np.empty((n, n), dtype=object)
        for idx in np.ndindex(n, n):
            num = int(rng.integers(1, 40))
            den = int(rng.integers(1, 40))
            vals[idx] = Fraction(num * (1 if rng.random() < 0.5 else -1), den)
    else:
        r = rng.uniform(*radii, size=(n, n))
        vals = r * np.exp(2j * math.pi * rng.random((n, n)))
    return PerturbedMatrix(vals, mask)


# ----------------------------------------------------------------- zeros of Lambda


def _is_lambda_zero(diff: complex, cache: specfun.ZetaZeroCache, match_tol: float) -> bool:
    """Is ``diff`` a zero of Lambda with a verified location: 1, or -rho for a cached rho?"""
    if abs(diff - 1) < match_tol:
        return True
    w = -diff  # zeta*(w) = 0 with w = 1/2 + i t
    if abs(w.real - 0.5) > match_tol:
        return False
    return any(abs(abs(w.imag) - t) < match_tol for t in cache.ordinates)


def lambda_matrix(points, cache: specfun.ZetaZeroCache, zero_tol: float = 1e-8,
                  match_tol: float = 1e-6) -> PerturbedMatrix:
    """L = (Lambda(s_i - s_j)) with verified zeros snapped to exact zero."""
    s = [complex(p) for p in points]
    n = len(s)
    vals = np.ones((n, n), dtype=complex)
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            diff = s[i] - s[j]
            v = specfun.lambda_big(diff)
            vals[i, j] = v
            if abs(v) < zero_tol and _is_lambda_zero(diff, cache, match_tol):
                mask[i, j] = True
    return PerturbedMatrix(vals, mask)


def cubic_relation_scan(rho_index: int, c_samples, offsets=(0.1, -0.1), cache=None,
                        rank_tol: float = 1e-8, zero_tol: float = 1e-8) -> dict:
    """Cohomology of the hexagon complex at T = {c, c + rho, c + 1} and near it.

    For each c the unperturbed point sits on the wheel locus. Each
    perturbation moves one of the three points by one offset, which
    breaks the wheel.
    """
    if cache is None:
        cache = specfun.ZetaZeroCache.compute(t_max=30.0)
    if not cache.verify():
        raise DomainError("zero cache failed verification")
    if not 0 <= rho_index < len(cache.ordinates):
        raise DomainError(f"zero index {rho_index} outside the cache of {len(cache.ordinates)} zeros")
    rho = cache.rho(rho_index)
    rows = []
    for c in c_samples:
        c = complex(c)
        base = [c, c + rho, c + 1]
        configs = [("wheel", None, 0.0, base)]
        for off in offsets:
            for k in range(3):
                pts = list(base)
                pts[k] = pts[k] + off
                configs.append(("perturbed", k + 1, float(off), pts))
        for kind, moved, off, pts in configs:
            L = lambda_matrix(pts, cache, zero_tol)
            info = cohomology_dims(build_complex(L), rank_tol, details=True)
            rows.append({
                "c": c, "kind": kind, "moved_point": moved, "offset": off,
                "points": pts, "wheels": detect_wheels(L),
                "masked": [(int(i) + 1, int(j) + 1) for i, j in zip(*np.nonzero(L.zero_mask))],
                "dims": info["dims"], "ranks": info["ranks"], "gaps": info["gaps"],
                "euler_ok": info["euler_ok"],
            })
    return {"rho": rho, "rows": rows}

"""Lattice bundles stored as Gram matrices, and sums over their subbundles.

A bundle of rank n is a positive-definite n x n Gram matrix G. Its degree
is det(G)^(-1/2), the inverse covolume. A rank-1 subbundle is a primitive
vector v with degree q(v)^(-1/2), where q(v) = v^T G v.

Iwasawa slice convention (rank 2): for a1, a2 > 0 and real x,

    G(a1, a2, x) = [[1/a1^2,       x/a1^2          ],
                    [x/a1^2,  x^2/a1^2 + 1/a2^2    ]]

so that e1 spans a subbundle of degree a1, the quotient has degree a2, and
deg = a1 a2. This Gram matrix is (g g^T)^(-1) for g = [[1, -x], [0, 1]] diag(a1, a2).
The bundle attached to tau = x + iy is the case a1 = sqrt(y), a2 = 1/sqrt(y).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import mpmath
import numpy as np

from . import specfun
from .errors import (BudgetError, ConvergenceError, DomainError, NonPrimitiveError,
                     NonSurjectiveError)

__all__ = [
    "GramBundle",
    "PrimitiveVector",
    "UpperHalfPoint",
    "degree",
    "bundle_from_tau",
    "bundle_from_iwasawa",
    "restrict_form",
    "pushforward_form",
    "integer_minors_gcd",
    "enumerate_rank1_subbundles",
    "subbundle_norms",
    "subbundle_norms_2d",
    "hall_product_11",
    "hall_slice_11",
    "degree_character",
    "hall_character_product",
    "eisenstein_maass",
    "eisenstein_maass_direct",
    "constant_term_rank2",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 1_000_000


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class UpperHalfPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (self.y > 0 and math.isfinite(self.y) and math.isfinite(self.x)):
            raise DomainError("tau must lie in the upper half plane")

    @classmethod
    def coerce(cls, tau) -> "UpperHalfPoint":
        if isinstance(tau, cls):
            return tau
        if isinstance(tau, (tuple, list)):
            return cls(*tau)
        z = complex(tau)
        return cls(z.real, z.imag)

    @property
    def tau(self) -> complex:
        return complex(self.x, self.y)

    def act(self, a: int, b: int, c: int, d: int) -> "UpperHalfPoint":
        """Moebius action of [[a, b], [c, d]] in SL2(Z)."""
        if a * d - b * c != 1:
            raise DomainError("matrix is not in SL2(Z)")
        z = (a * self.tau + b) / (c * self.tau + d)
        return UpperHalfPoint(z.real, z.imag)


class GramBundle:
    """Positive-definite Gram matrix of a lattice bundle."""

    __slots__ = ("G", "_chol")

    def __init__(self, G):
        G = np.array(G, dtype=float)
        if G.ndim == 0:
            G = G.reshape(1, 1)
        if G.ndim != 2 or G.shape[0] != G.shape[1] or G.shape[0] == 0:
            raise DomainError("Gram matrix must be square and non-empty")
        if not np.all(np.isfinite(G)):
            raise DomainError("Gram matrix has non-finite entries")
        scale = max(1.0, float(np.max(np.abs(G))))
        if np.max(np.abs(G - G.T)) > 1e-12 * scale:
            raise DomainError("Gram matrix is not symmetric")
        G = 0.5 * (G + G.T)
        try:
            self._chol = np.linalg.cholesky(G)
        except np.linalg.LinAlgError as exc:
            raise DomainError("Gram matrix is not positive definite") from exc
        self.G = G
        self.G.setflags(write=False)

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def cholesky(self) -> np.ndarray:
        return self._chol

    def degree(self) -> float:
        return float(np.prod(np.diag(self._chol))) ** -1.0

    def norm(self, v) -> float:
        v = np.asarray(v, dtype=float)
        return float(v @ self.G @ v)

    def to_json(self) -> list:
        return self.G.tolist()

    @classmethod
    def from_json(cls, data) -> "GramBundle":
        return cls(np.array(data, dtype=float))

    def __repr__(self):
        return f"GramBundle({self.G.tolist()!r})"


@dataclass(frozen=True)
class PrimitiveVector:
    """Integer vector with coprime entries, first nonzero entry positive."""

    coords: tuple

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        if not any(coords):
            raise NonPrimitiveError("zero vector is not primitive")
        if reduce(math.gcd, coords) != 1:
            raise NonPrimitiveError(f"{coords} is not primitive")
        lead = next(c for c in coords if c)
        if lead < 0:
            coords = tuple(-c for c in coords)
        object.__setattr__(self, "coords", coords)


# ---------------------------------------------------------------------------
# construction


def degree(E: GramBundle) -> float:
    return E.degree()


def bundle_from_tau(tau) -> GramBundle:
    """The degree-1 bundle Z + Z tau with the standard form scaled by 1/Im(tau)."""
    p = UpperHalfPoint.coerce(tau)
    x, y = p.x, p.y
    return GramBundle(np.array([[1.0, x], [x, x * x + y * y]]) / y)


def bundle_from_iwasawa(a1: float, a2: float, x: float) -> GramBundle:
    """Gram matrix on the Iwasawa slice (see module docstring)."""
    if not (a1 > 0 and a2 > 0):
        raise DomainError("a1 and a2 must be positive")
    i1, i2 = 1.0 / (a1 * a1), 1.0 / (a2 * a2)
    return GramBundle(np.array([[i1, x * i1], [x * i1, x * x * i1 + i2]]))


def _iwasawa_batch(a1, a2, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=float)
    i1, i2 = 1.0 / (a1 * a1), 1.0 / (a2 * a2)
    G = np.empty(xs.shape + (2, 2))
    G[..., 0, 0] = i1
    G[..., 0, 1] = G[..., 1, 0] = xs * i1
    G[..., 1, 1] = xs * xs * i1 + i2
    return G


# ---------------------------------------------------------------------------
# exact integer linear algebra


def _bareiss_det(rows) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def _integer_matrix(M, name) -> np.ndarray:
    arr = np.asarray(M)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise DomainError(f"{name} must have integer entries")
    return arr.astype(np.int64)


def integer_minors_gcd(M) -> int:
    """gcd of the maximal minors of an integer matrix (0 if rank-deficient).

    For an n x r basis matrix (r <= n) this is the product of the Smith
    invariants. It equals 1 exactly when the columns span a primitive
    sublattice.
    """
    M = _integer_matrix(M, "matrix")
    rows, cols = M.shape
    r = min(rows, cols)
    g = 0
    if rows >= cols:
        for idx in itertools.combinations(range(rows), r):
            g = math.gcd(g, _bareiss_det(M[list(idx), :].tolist()))
    else:
        for idx in itertools.combinations(range(cols), r):
            g = math.gcd(g, _bareiss_det(M[:, list(idx)].tolist()))
    return abs(g)


# ---------------------------------------------------------------------------
# sub and quotient forms


def restrict_form(E: GramBundle, basis) -> GramBundle:
    """Pull the form back to the sublattice spanned by the columns of ``basis``."""
    B = _integer_matrix(basis, "sublattice basis")
    if B.shape[0] != E.n:
        raise DomainError("basis vectors have the wrong length")
    g = integer_minors_gcd(B)
    if g == 0:
        raise DomainError("basis columns are linearly dependent")
    if g != 1:
        raise NonPrimitiveError(f"sublattice has index {g} in its saturation")
    Bf = B.astype(float)
    return GramBundle(Bf.T @ E.G @ Bf)


def pushforward_form(E: GramBundle, quotient_map) -> GramBundle:
    """Minimized form on the target of a surjection Z^n -> Z^r.

    The value at w is min{q(v) : J v = w}, which is w^T (J G^-1 J^T)^-1 w. In
    a basis adapted to the kernel this is the Schur complement of the kernel
    block.
    """
    J = _integer_matrix(quotient_map, "quotient map")
    if J.shape[1] != E.n:
        J = J.T if J.shape[0] == E.n else J
    if J.shape[1] != E.n:
        raise DomainError("quotient map has the wrong number of columns")
    if J.shape[0] > E.n or integer_minors_gcd(J) != 1:
        raise NonSurjectiveError("quotient map is not surjective onto Z^r")
    Jf = J.astype(float)
    inner = Jf @ np.linalg.solve(E.G, Jf.T)
    return GramBundle(np.linalg.inv(inner))


# ---------------------------------------------------------------------------
# enumeration


def _fincke_pohst(G: np.ndarray, bound: float, cap: int):
    """All nonzero integer v with v^T G v <= bound, one of each +-v pair."""
    n = G.shape[0]
    # q(v) = sum_i d_i (v_i + sum_{j>i} m_ij v_j)^2 from G = M^T D M (M unit upper)
    R = np.linalg.cholesky(G).T  # G = R^T R, R upper-triangular
    d = np.diag(R) ** 2
    m = R / np.diag(R)[:, None]  # m[i, j] for j > i
    out, count = [], 0
    v = [0] * n

    def recurse(i, remaining):
        nonlocal count
        center = -sum(m[i, j] * v[j] for j in range(i + 1, n))
        radius = math.sqrt(max(remaining, 0.0) / d[i])
        lo, hi = math.ceil(center - radius - 1e-12), math.floor(center + radius + 1e-12)
        for k in range(lo, hi + 1):
            count += 1
            if count > cap:
                raise BudgetError(f"enumeration exceeded {cap} candidates")
            v[i] = k
            used = d[i] * (k - center) ** 2
            if used > remaining * (1 + 1e-12) + 1e-300:
                continue
            if i == 0:
                if any(v):
                    out.append(tuple(v))
            else:
                recurse(i - 1, remaining - used)
        v[i] = 0

    recurse(n - 1, bound)
    # keep one of each sign pair: first nonzero entry positive
    return [t for t in out if next(c for c in t if c) > 0]


def _lagrange_reduce(G: np.ndarray):
    """Gauss-Lagrange reduction of a batch of 2x2 Gram matrices.

    Returns (reduced Gram, U) with reduced = U^T G U, U in GL2(Z).
    """
    G = np.array(G, dtype=float, copy=True)
    K = G.shape[0]
    U = np.tile(np.eye(2, dtype=np.int64), (K, 1, 1))
    active = np.ones(K, dtype=bool)
    for _ in range(200):
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        a, b, c = G[idx, 0, 0], G[idx, 0, 1], G[idx, 1, 1]
        mu = np.rint(b / a)
        # b2 <- b2 - mu b1
        c_new = c - 2 * mu * b + mu * mu * a
        b_new = b - mu * a
        U[idx, :, 1] -= mu.astype(np.int64)[:, None] * U[idx, :, 0]
        swap = c_new < a
        G[idx, 0, 1] = G[idx, 1, 0] = b_new
        G[idx, 1, 1] = c_new
        s_idx = idx[swap]
        if s_idx.size:
            G[s_idx, 0, 0], G[s_idx, 1, 1] = G[s_idx, 1, 1].copy(), G[s_idx, 0, 0].copy()
            U[s_idx] = U[s_idx][:, :, ::-1]
            # keep det(U) = +1 up to sign; sign does not matter for norms
        active[idx[~swap]] = False
    return G, U


def subbundle_norms_2d(G, bound: float, cap: int = DEFAULT_CAP, return_vectors=False):
    """Norms q(v) <= bound over primitive v (one per sign pair) for a batch of rank-2 Grams.

    ``G`` has shape (K, 2, 2). The result is ``(owner, q)``: flat arrays in
    which ``owner[j]`` names the Gram matrix that ``q[j]`` belongs to. With
    ``return_vectors`` a third array of coordinates (original basis) is
    returned.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim == 2:
        G = G[None]
    K = G.shape[0]
    red, U = _lagrange_reduce(G)
    a, b, c = red[:, 0, 0], red[:, 0, 1], red[:, 1, 1]
    det = a * c - b * b
    if np.any(det <= 0):
        raise DomainError("Gram matrix is not positive definite")
    # box in the reduced basis: |c2| <= sqrt(bound a / det), |c1| <= sqrt(bound c / det)
    B2 = np.floor(np.sqrt(bound * a / det) + 1e-9).astype(np.int64)
    B1 = np.floor(np.sqrt(bound * c / det) + 1e-9).astype(np.int64)
    total = int(np.sum((2 * B1 + 1) * (B2 + 1)))
    if total > cap:
        raise BudgetError(f"enumeration needs {total} candidates, cap is {cap}")
    owners, qs, vecs = [], [], []
    # group batch members with identical boxes so each group is one array op
    keys = B1 * (int(B2.max()) + 1) + B2
    for key in np.unique(keys):
        members = np.nonzero(keys == key)[0]
        b1, b2 = int(B1[members[0]]), int(B2[members[0]])
        c1 = np.arange(-b1, b1 + 1)
        c2 = np.arange(0, b2 + 1)
        C1, C2 = np.meshgrid(c1, c2, indexing="ij")
        C1, C2 = C1.ravel(), C2.ravel()
        half = (C2 > 0) | ((C2 == 0) & (C1 > 0))
        C1, C2 = C1[half], C2[half]
        prim = np.gcd(C1, C2) == 1
        C1, C2 = C1[prim], C2[prim]
        Q = (a[members, None] * C1 * C1 + 2 * b[members, None] * C1 * C2
             + c[members, None] * C2 * C2)
        keep = Q <= bound * (1 + 1e-12)
        rows, cols = np.nonzero(keep)
        owners.append(members[rows])
        qs.append(Q[rows, cols])
        if return_vectors:
            Um = U[members[rows]]
            v = Um[:, :, 0] * C1[cols, None] + Um[:, :, 1] * C2[cols, None]
            vecs.append(v)
    owner = np.concatenate(owners) if owners else np.zeros(0, dtype=np.int64)
    q = np.concatenate(qs) if qs else np.zeros(0)
    order = np.lexsort((q, owner))  # deterministic: by owner, then by norm
    if return_vectors:
        v = np.concatenate(vecs) if vecs else np.zeros((0, 2), dtype=np.int64)
        v = v[order]
        lead = np.where(v[:, 0] != 0, v[:, 0], v[:, 1])
        v = v * np.sign(lead)[:, None]
        return owner[order], q[order], v
    return owner[order], q[order]


def enumerate_rank1_subbundles(E: GramBundle, degree_min: float, cap: int = DEFAULT_CAP) -> list:
    """Primitive vectors v (up to sign) with deg = q(v)^(-1/2) >= degree_min, sorted by q."""
    if not degree_min > 0:
        raise DomainError("degree_min must be positive")
    bound = 1.0 / (degree_min * degree_min)
    if E.n == 1:
        return [PrimitiveVector((1,))] if E.G[0, 0] <= bound * (1 + 1e-12) else []
    if E.n == 2:
        _, q, v = subbundle_norms_2d(E.G, bound, cap, return_vectors=True)
        return [PrimitiveVector(tuple(row)) for row in v]
    raw = _fincke_pohst(E.G, bound * (1 + 1e-12), cap)
    prim = [t for t in raw if reduce(math.gcd, t) == 1]
    prim.sort(key=lambda t: (E.norm(t), t))
    return [PrimitiveVector(t) for t in prim]


def subbundle_norms(E: GramBundle, degree_min: float, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Sorted norms q(v) of the rank-1 subbundles of degree >= degree_min."""
    bound = 1.0 / (degree_min * degree_min)
    if E.n == 2:
        return subbundle_norms_2d(E.G, bound, cap)[1]
    vecs = enumerate_rank1_subbundles(E, degree_min, cap)
    return np.array(sorted(E.norm(v.coords) for v in vecs))


# ---------------------------------------------------------------------------
# Hall product, rank 1 x rank 1


def _vectorize(f):
    def call(x):
        x = np.asarray(x, dtype=float)
        try:
            out = np.asarray(f(x), dtype=complex)
            if out.shape == x.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([complex(f(float(t))) for t in x.ravel()], dtype=complex).reshape(x.shape)

    return call


def _hall_terms(f1, f2, d, D):
    """deg(E')^(1/2) deg(E/E')^(-1/2) f1(deg E') f2(deg E/E')."""
    quot = D / d
    return np.sqrt(d / quot) * _vectorize(f1)(d) * _vectorize(f2)(quot)


def hall_product_11(f1, f2, E: GramBundle, degree_floor: float, cap: int = DEFAULT_CAP) -> complex:
    """Hall product of two functions on degree-1 line bundles, evaluated at a rank-2 bundle.

    Sums over rank-1 subbundles E' with deg(E') >= degree_floor. Terms in
    increasing-norm order are summed in a fixed sequence, which makes the
    result deterministic.
    """
    if E.n != 2:
        raise DomainError("hall_product_11 evaluates on rank-2 bundles")
    q = subbundle_norms(E, degree_floor, cap)
    if q.size == 0:
        return 0j
    d = q ** -0.5
    terms = _hall_terms(f1, f2, d, E.degree())
    return complex(np.sum(terms[::-1]))


def hall_slice_11(f1, f2, a1: float, a2: float, xs, degree_window, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Hall product values at the slice bundles G(a1, a2, x) for many x at once.

    ``degree_window = (d_lo, d_hi)``: only subbundles whose degree lies in
    the window are summed. The caller guarantees the terms outside it are
    negligible.
    """
    d_lo, d_hi = degree_window
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    out = np.zeros(xs.shape, dtype=complex)
    if d_hi < d_lo:
        return out
    owner, q = subbundle_norms_2d(_iwasawa_batch(a1, a2, xs), 1.0 / (d_lo * d_lo), cap)
    d = q ** -0.5
    keep = d <= d_hi
    owner, d = owner[keep], d[keep]
    if d.size:
        terms = _hall_terms(f1, f2, d, a1 * a2)
        np.add.at(out, owner, terms)
    return out


def degree_character(t):
    """The function d -> d^t on degree-1 line bundles."""
    t = complex(t)
    return lambda d: np.exp(t * np.log(np.asarray(d, dtype=float)))


def hall_character_product(t1, t2, E: GramBundle, degree_floor: float = 1e-3,
                           cap: int = 4 * DEFAULT_CAP) -> dict:
    """Hall product of d^t1 and d^t2 at a rank-2 bundle, with the lattice tail added.

    The terms are D^(t2 - 1/2) q(v)^(-w), with w = (1 + t1 - t2)/2 and
    D = deg E. This needs Re w > 1. Subbundles of degree >= degree_floor
    (q <= R = floor^-2) are summed exactly. The rest is replaced by its
    mean-density value D^(t2 + 1/2) (3/pi) R^(1-w)/(w-1). The leftover
    error is of order R^(1/2 - Re w), and ``error_estimate`` reports it.
    """
    t1, t2 = complex(t1), complex(t2)
    w = (1 + t1 - t2) / 2
    if w.real <= 1:
        raise ConvergenceError("the character Hall sum needs Re(t1 - t2) > 1")
    D = E.degree()
    q = subbundle_norms(E, degree_floor, cap)
    R = degree_floor ** -2
    head = complex(np.sum(np.exp(-w * np.log(q[::-1]))))
    pref = D ** (t2 - 0.5)
    tail = D * (3.0 / math.pi) * R ** (1 - w) / (w - 1)
    value = pref * (head + tail)
    return {
        "value": complex(value),
        "terms": int(q.size),
        "radius": R,
        "tail": complex(pref * tail),
        "error_estimate": float(abs(pref) * R ** (0.5 - w.real)),
    }


# ---------------------------------------------------------------------------
# Eisenstein-Maass series


def _epstein_ewald(G: np.ndarray, s: complex, tol: float) -> complex:
    """Sum over nonzero v of q(v)^(-s) for a 2x2 Gram G, by Ewald splitting.

    pi^-s Gamma(s) Z(s) = sum' Gamma(s, pi q)(pi q)^-s
                          + det^-1/2 sum' Gamma(1-s, pi q*)(pi q*)^(s-1)
                          + det^-1/2/(s-1) - 1/s
    with q* the dual form (Gram G^-1). Both sums converge like exp(-pi q).
    """
    det = float(np.linalg.det(G))
    dual = np.linalg.inv(G)
    sr = abs(s.real) + 1.0
    # exp(-x) x^sr below tol/1e3 on the boundary shell
    x_cut = 10.0
    while math.exp(-x_cut) * x_cut ** sr * (x_cut + 10) > tol * 1e-3:
        x_cut *= 1.2
    q_cut = x_cut / math.pi

    def half_norms(M):
        _, q = subbundle_norms_2d(M, q_cut, cap=10 ** 6)
        return q  # primitive only; expand by multiples below

    def all_norms(M):
        prim = half_norms(M)
        out = []
        for q in prim:
            k = 1
            while k * k * q <= q_cut:
                out.append(k * k * q)
                k += 1
        return np.sort(np.array(out))

    with mpmath.workdps(25):
        s_mp = mpmath.mpc(s.real, s.imag)
        direct = mpmath.mpf(0)
        for q in all_norms(G)[::-1]:
            x = mpmath.pi * q
            direct += mpmath.gammainc(s_mp, x) * x ** (-s_mp)
        dual_sum = mpmath.mpf(0)
        for q in all_norms(dual)[::-1]:
            x = mpmath.pi * q
            dual_sum += mpmath.gammainc(1 - s_mp, x) * x ** (s_mp - 1)
        root = mpmath.sqrt(det)
        total = 2 * direct + 2 * dual_sum / root + 1 / (root * (s_mp - 1)) - 1 / s_mp
        Z = total * mpmath.pi ** s_mp / mpmath.gamma(s_mp)
    return complex(Z)


def eisenstein_maass(tau, s, tol: float = 1e-12) -> complex:
    """E(tau, s) = (1/2) sum over coprime (m, n) of Im(tau)^s / |m + n tau|^(2s), for Re s > 1.

    The value is computed as Z(s) / (2 zeta(2s)). Here Z is the Epstein zeta
    function of the degree-1 bundle of tau. Z is evaluated by Ewald
    splitting, so the truncation error is exponentially small and set from
    ``tol``. :func:`eisenstein_maass_direct` is the plain truncated
    coprime sum.
    """
    s = specfun.as_point(s)
    if s.real <= 1:
        raise ConvergenceError("the coprime series converges only for Re(s) > 1")
    E = bundle_from_tau(tau)
    Z = _epstein_ewald(E.G, s, tol)
    return Z / (2.0 * specfun.zeta(2 * s))


def eisenstein_maass_direct(tau, s, tol: float = 1e-8, cap: int = 4 * DEFAULT_CAP) -> dict:
    """Truncated coprime-pair sum with the mean-density tail.

    The radius R is chosen so that the fluctuation estimate R^(1/2 - Re s)
    stays below ``tol``. If the enumeration cap is hit first, the radius is
    capped and ``error_estimate`` reports the larger error.
    """
    s = specfun.as_point(s)
    if s.real <= 1:
        raise ConvergenceError("the coprime series converges only for Re(s) > 1")
    E = bundle_from_tau(tau)
    R = tol ** (-1.0 / (s.real - 0.5))
    R = min(R, cap / 1.2)
    floor = R ** -0.5
    res = hall_character_product(2 * s - 1, 0.0, E, degree_floor=floor, cap=cap)
    return res


# ---------------------------------------------------------------------------
# constant term on the Iwasawa slice


def constant_term_rank2(f, a1: float, a2: float, quad_points: int = 32,
                        rule: str = "gauss-legendre", vectorized: bool = False) -> complex:
    """int_0^1 f(a1, a2, x) dx.

    ``rule`` is either "gauss-legendre" or "trapezoid". The trapezoid rule
    is spectrally accurate here, because slice functions are 1-periodic
    in x. With ``vectorized`` set, ``f`` is called once with the whole
    array of nodes.
    """
    if quad_points < 1:
        raise DomainError("quad_points must be positive")
    if rule == "gauss-legendre":
        nodes, weights = np.polynomial.legendre.leggauss(quad_points)
        xs, ws = 0.5 * (nodes + 1.0), 0.5 * weights
    elif rule == "trapezoid":
        xs = np.arange(quad_points) / quad_points
        ws = np.full(quad_points, 1.0 / quad_points)
    else:
        raise DomainError(f"unknown rule {rule!r}")
    if vectorized:
        vals = np.asarray(f(a1, a2, xs), dtype=complex)
    else:
        vals = np.array([complex(f(a1, a2, float(x))) for x in xs])
    return complex(np.dot(ws, vals))

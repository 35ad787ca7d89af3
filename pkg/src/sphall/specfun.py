"""Gamma, zeta and the kernels built from the completed zeta function.

Everything here works on numpy arrays internally (``*_array`` functions) so
that contour quadrature can evaluate thousands of nodes at once. The scalar
wrappers accept anything convertible to ``complex`` and report poles through
:class:`~sphall.errors.PoleError` rather than returning ``inf``.

Conventions::

    zeta_star(s)  = pi**(-s/2) * Gamma(s/2) * zeta(s)      poles at 0 and 1
    phi(s)        = zeta_star(s) / zeta_star(s + 1)
    lambda_big(s) = zeta_star(-s) * (s - 1) * (-s - 1)     pole at 0 only
"""

from __future__ import annotations

import enum
import math
import os
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, KernelZeroDivisionError, PoleError

__all__ = [
    "as_point",
    "gamma",
    "gamma_array",
    "zeta",
    "zeta_array",
    "zeta_star",
    "zeta_star_array",
    "phi",
    "phi_array",
    "lambda_big",
    "lambda_big_array",
    "theta",
    "theta_array",
    "find_zeta_zeros",
    "ZetaZeroCache",
    "KernelKind",
    "KernelFunction",
    "make_kernel",
]

# ---------------------------------------------------------------------------
# points


def as_point(s) -> complex:
    """Coerce ``s`` to a finite Python complex, rejecting NaN and infinities."""
    try:
        z = complex(s)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a complex number: {s!r}") from exc
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"non-finite complex point: {s!r}")
    return z


def _as_array(s) -> np.ndarray:
    arr = np.asarray(s, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite entries in complex array")
    return arr


def _is_integer(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (z.real == np.round(z.real))


# ---------------------------------------------------------------------------
# Gamma: Lanczos (g = 7, 9 terms) plus reflection

_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _loggamma_right(z: np.ndarray) -> np.ndarray:
    """log Gamma(z) for Re z >= 1/2 (principal branch up to 2*pi*i)."""
    zm = z - 1.0
    x = np.full(zm.shape, _LANCZOS_COEF[0], dtype=complex)
    for k in range(1, len(_LANCZOS_COEF)):
        x = x + _LANCZOS_COEF[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(x)


def gamma_array(s) -> np.ndarray:
    """Vectorized complex Gamma. Raises PoleError at non-positive integers."""
    z = np.atleast_1d(_as_array(s))
    poles = _is_integer(z) & (z.real <= 0)
    if np.any(poles):
        bad = z[poles][0]
        raise PoleError(f"Gamma has a pole at {bad.real:g}", where=("gamma", complex(bad)))
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = np.exp(_loggamma_right(z[right]))
    left = ~right
    if np.any(left):
        zl = z[left]
        # Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        out[left] = np.pi / (np.sin(np.pi * zl) * np.exp(_loggamma_right(1.0 - zl)))
    return out.reshape(np.shape(s)) if np.ndim(s) else out


def gamma(s) -> complex:
    z = as_point(s)
    if z.imag == 0 and z.real <= 0 and z.real == round(z.real):
        raise PoleError(f"Gamma has a pole at {z.real:g}", where=("gamma", z))
    value = complex(gamma_array(np.array([z]))[0])
    return value


# ---------------------------------------------------------------------------
# zeta: Euler-Maclaurin with an adaptive cutoff

_EM_ORDER = 10
_BERNOULLI = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
              Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6),
              Fraction(-3617, 510), Fraction(43867, 798), Fraction(-174611, 330),
              Fraction(854513, 138)]
# B_{2k} / (2k)! for k = 1..p+1
_EM_COEF = [float(_BERNOULLI[k - 1] / math.factorial(2 * k)) for k in range(1, _EM_ORDER + 2)]
_EM_TARGET = 1e-17


def _em_tail_bound(s: np.ndarray, n: int) -> np.ndarray:
    """Backlund bound on the Euler-Maclaurin remainder after ``_EM_ORDER`` terms."""
    p = _EM_ORDER
    poch = np.ones(s.shape)
    for j in range(2 * p + 1):
        poch = poch * np.abs(s + j)
    sigma = s.real
    return np.abs(poch * _EM_COEF[p] * n ** (-sigma - 2 * p - 1) / (sigma + 2 * p + 1))


def _em_cutoff(s: np.ndarray) -> int:
    """Smallest N (searched geometrically) meeting the tail target for every s."""
    n = max(10, int(np.max(np.abs(s))) // 4 + 10) if s.size else 10
    while True:
        if np.all(_em_tail_bound(s, n) <= _EM_TARGET):
            return n
        n = int(n * 1.25) + 1


def _zeta_em(s: np.ndarray) -> np.ndarray:
    """Euler-Maclaurin evaluation, intended for Re s >= 0, s != 1."""
    n_cut = _em_cutoff(s)
    k = np.arange(n_cut - 1, 0, -1, dtype=float)  # sum small terms first
    logk = np.log(k)
    head = np.exp(-np.outer(s, logk)).sum(axis=1)
    log_n = math.log(n_cut)
    n_pow = np.exp(-s * log_n)  # N^{-s}
    total = head + n_pow / 2.0 + n_pow * n_cut / (s - 1.0)
    poch = s.copy()  # s (s+1) ... (s+2k-2)
    term_pow = n_pow / n_cut  # N^{-s-1}
    for kk in range(1, _EM_ORDER + 1):
        total = total + _EM_COEF[kk - 1] * poch * term_pow
        poch = poch * (s + 2 * kk - 1) * (s + 2 * kk)
        term_pow = term_pow / (n_cut * n_cut)
    return total


def zeta_array(s) -> np.ndarray:
    """Vectorized Riemann zeta. Raises PoleError if any entry equals 1."""
    z = np.atleast_1d(_as_array(s)).ravel()
    if np.any(z == 1):
        raise PoleError("zeta has a pole at s = 1", where=("zeta", 1 + 0j))
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0
    if np.any(right):
        out[right] = _zeta_em(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        # zeta(s) = 2^s pi^(s-1) sin(pi s / 2) Gamma(1 - s) zeta(1 - s); the
        # reflected argument has Re > 1, so no cancellation in the series.
        refl = _zeta_em(1.0 - zl)
        val = (np.exp(zl * math.log(2.0) + (zl - 1.0) * math.log(math.pi))
               * np.sin(np.pi * zl / 2.0)
               * np.exp(_loggamma_right(1.0 - zl)) * refl)
        trivial = _is_integer(zl) & (np.round(zl.real) % 2 == 0)
        val[trivial] = 0.0
        out[left] = val
    return out.reshape(np.shape(s)) if np.ndim(s) else out


def zeta(s) -> complex:
    z = as_point(s)
    return complex(zeta_array(np.array([z]))[0])


# ---------------------------------------------------------------------------
# completed zeta and the two kernels


def zeta_star_array(s) -> np.ndarray:
    """pi^(-s/2) Gamma(s/2) zeta(s), vectorized; PoleError at 0 and 1.

    At negative even integers Gamma(s/2) has a pole cancelled by a trivial zero
    of zeta; there the value is taken from zeta_star(1 - s).
    """
    z = np.atleast_1d(_as_array(s)).ravel()
    if np.any((z == 0) | (z == 1)):
        bad = z[(z == 0) | (z == 1)][0]
        raise PoleError(f"zeta* has a pole at s = {bad.real:g}", where=("zeta_star", complex(bad)))
    removable = _is_integer(z) & (z.real < 0) & (np.round(z.real) % 2 == 0)
    z_eval = np.where(removable, 1.0 - z, z)
    half = z_eval / 2.0
    log_pi = math.log(math.pi)
    out = np.exp(-half * log_pi) * gamma_array(half) * zeta_array(z_eval)
    return out.reshape(np.shape(s)) if np.ndim(s) else out


def zeta_star(s) -> complex:
    z = as_point(s)
    if z == 0 or z == 1:
        raise PoleError(f"zeta* has a pole at s = {z.real:g}", where=("zeta_star", z))
    return complex(zeta_star_array(np.array([z]))[0])


def phi_array(s) -> np.ndarray:
    """zeta*(s) / zeta*(s + 1) with the removable points s = 0 and s = -1 filled in."""
    z = np.atleast_1d(_as_array(s)).ravel()
    if np.any(z == 1):
        raise PoleError("Phi has a pole at s = 1 (numerator zeta*(s))", where=("phi", "zeta_star(s)", 1 + 0j))
    out = np.empty(z.shape, dtype=complex)
    at_zero = z == 0
    at_minus_one = z == -1
    out[at_zero] = -1.0
    out[at_minus_one] = 0.0
    rest = ~(at_zero | at_minus_one)
    if np.any(rest):
        zr = z[rest]
        num = zeta_star_array(zr)
        den = zeta_star_array(zr + 1.0)
        if np.any(den == 0):
            bad = zr[den == 0][0]
            raise KernelZeroDivisionError(
                f"Phi: denominator zeta*(s+1) vanishes at s = {bad}", where=("phi", "zeta_star(s+1)", complex(bad)))
        out[rest] = num / den
    return out.reshape(np.shape(s)) if np.ndim(s) else out


def phi(s) -> complex:
    z = as_point(s)
    return complex(phi_array(np.array([z]))[0])


def lambda_big_array(s) -> np.ndarray:
    """zeta*(-s)(s - 1)(-s - 1); the apparent pole of zeta*(-s) at s = -1 is removable (value -2)."""
    z = np.atleast_1d(_as_array(s)).ravel()
    if np.any(z == 0):
        raise PoleError("Lambda has a pole at s = 0", where=("lambda_big", 0j))
    out = np.empty(z.shape, dtype=complex)
    at_minus_one = z == -1
    out[at_minus_one] = -2.0
    rest = ~at_minus_one
    if np.any(rest):
        zr = z[rest]
        out[rest] = zeta_star_array(-zr) * (zr - 1.0) * (-zr - 1.0)
    return out.reshape(np.shape(s)) if np.ndim(s) else out


def lambda_big(s) -> complex:
    z = as_point(s)
    return complex(lambda_big_array(np.array([z]))[0])


# ---------------------------------------------------------------------------
# theta

_THETA_DIRECT_MIN = 0.05


def _theta_direct(b: np.ndarray) -> np.ndarray:
    # stop once exp(-pi n^2 b) < 1e-18
    n_max = int(math.ceil(math.sqrt(18 * math.log(10) / (math.pi * float(np.min(b)))))) + 1
    n = np.arange(n_max, 0, -1, dtype=float)
    terms = np.exp(-math.pi * np.outer(b, n * n))
    return 1.0 + 2.0 * terms.sum(axis=1)


def theta_array(b) -> np.ndarray:
    """sum_{n in Z} exp(-pi n^2 b) for b > 0, vectorized."""
    arr = np.atleast_1d(np.asarray(b, dtype=float)).ravel()
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError("theta requires finite b > 0")
    out = np.empty(arr.shape)
    big = arr >= _THETA_DIRECT_MIN
    if np.any(big):
        out[big] = _theta_direct(arr[big])
    if np.any(~big):
        small = arr[~big]
        # Jacobi: theta(b) = b^{-1/2} theta(1/b)
        out[~big] = _theta_direct(1.0 / small) / np.sqrt(small)
    return out.reshape(np.shape(b)) if np.ndim(b) else out


def theta(b) -> float:
    try:
        x = float(b)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"theta needs a real argument, got {b!r}") from exc
    return float(theta_array(np.array([x]))[0])


# ---------------------------------------------------------------------------
# zeros on the critical line


def _critical_values(t: np.ndarray) -> np.ndarray:
    """zeta*(1/2 + it), which is real for real t."""
    return zeta_star_array(0.5 + 1j * np.asarray(t, dtype=float)).real


@dataclass
class ZetaZeroCache:
    """Verified ordinates t with zeta*(1/2 + it) = 0, sorted ascending."""

    ordinates: list = field(default_factory=list)
    tolerance: float = 1e-6

    HEADER = "# zeta-zero-cache v1 tol={tol}"

    def __post_init__(self):
        self.ordinates = [float(t) for t in self.ordinates]
        if any(b <= a for a, b in zip(self.ordinates, self.ordinates[1:])):
            raise DomainError("zero ordinates must be strictly increasing")

    def verify(self) -> bool:
        """Every ordinate has |zeta*(1/2+it)| < tolerance."""
        if not self.ordinates:
            return True
        vals = np.abs(zeta_star_array(0.5 + 1j * np.array(self.ordinates)))
        return bool(np.all(vals < self.tolerance))

    def rho(self, index: int) -> complex:
        return complex(0.5, self.ordinates[index])

    def write(self, path) -> None:
        """Atomic write: readers see either the old or the new file."""
        lines = [self.HEADER.format(tol=repr(self.tolerance))]
        lines += [f"{t:.12g}" for t in self.ordinates]
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".zeros-", text=True)
        with os.fdopen(fd, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)

    @classmethod
    def read(cls, path) -> "ZetaZeroCache":
        with open(path) as fh:
            header = fh.readline().strip()
            if not header.startswith("# zeta-zero-cache v1 tol="):
                raise DomainError(f"{path}: not a zeta-zero-cache v1 file")
            tol = float(header.split("tol=", 1)[1])
            ords = [float(line) for line in fh if line.strip() and not line.startswith("#")]
        return cls(ords, tol)

    @classmethod
    def compute(cls, t_max: float = 30.0, tolerance: float = 1e-6, step: float = 0.05) -> "ZetaZeroCache":
        return cls(find_zeta_zeros(0.0, t_max, step=step), tolerance)


def find_zeta_zeros(t_min: float, t_max: float, step: float = 0.05, xtol: float = 1e-9) -> list:
    """Ordinates of sign changes of t -> zeta*(1/2 + it) on [t_min, t_max].

    A uniform scan with spacing ``step`` brackets the sign changes, and
    each bracket is bisected until its width drops below ``xtol``. Zeros
    closer together than ``step`` can be missed. Below height 100 the
    smallest gap is far larger than the default step.
    """
    t_min, t_max = float(t_min), float(t_max)
    if not (t_min >= 0 and t_max > t_min):
        raise DomainError("need 0 <= t_min < t_max")
    count = max(2, int(math.ceil((t_max - t_min) / step)) + 1)
    grid = np.linspace(t_min, t_max, count)
    vals = _critical_values(grid)
    zeros = []
    for i in range(count - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0:
            if not zeros or abs(zeros[-1] - a) > xtol:
                zeros.append(float(a))
            continue
        if fa * fb >= 0:
            continue
        while b - a >= xtol:
            mid = 0.5 * (a + b)
            fm = float(_critical_values(np.array([mid]))[0])
            if fm == 0:
                a = b = mid
                break
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        zeros.append(float(0.5 * (a + b)))
    if vals[-1] == 0 and (not zeros or abs(zeros[-1] - grid[-1]) > xtol):
        zeros.append(float(grid[-1]))
    return zeros


# ---------------------------------------------------------------------------
# kernel objects


class KernelKind(enum.Enum):
    ZETA_STAR = "ZetaStar"
    PHI = "Phi"
    LAMBDA_BIG = "LambdaBig"


_KERNEL_ARRAYS = {
    KernelKind.ZETA_STAR: zeta_star_array,
    KernelKind.PHI: phi_array,
    KernelKind.LAMBDA_BIG: lambda_big_array,
}
_KERNEL_POLES = {
    KernelKind.ZETA_STAR: (0j, 1 + 0j),
    KernelKind.PHI: (1 + 0j,),
    KernelKind.LAMBDA_BIG: (0j,),
}


@dataclass(frozen=True)
class KernelFunction:
    """One of zeta*, Phi, Lambda with its exactly known poles and zero hints.

    ``zero_hints`` are derived from the nontrivial zeros passed in
    (both rho and its conjugate):

    * zeta*: rho.
    * Phi: rho, plus -1, where the denominator has its pole.
    * Lambda: 1 and -rho.
    """

    kind: KernelKind
    pole_set: tuple
    zero_hints: tuple = ()

    def __call__(self, s) -> complex:
        return complex(self.evaluate(np.array([as_point(s)]))[0])

    def evaluate(self, s) -> np.ndarray:
        return _KERNEL_ARRAYS[self.kind](s)


def make_kernel(kind, zeros: ZetaZeroCache | None = None) -> KernelFunction:
    kind = KernelKind(kind) if not isinstance(kind, KernelKind) else kind
    rhos = []
    if zeros is not None:
        for t in zeros.ordinates:
            rhos += [complex(0.5, t), complex(0.5, -t)]
    if kind is KernelKind.ZETA_STAR:
        hints = rhos
    elif kind is KernelKind.PHI:
        hints = [-1 + 0j] + rhos
    else:
        hints = [1 + 0j] + [-r for r in rhos]
    return KernelFunction(kind, _KERNEL_POLES[kind], tuple(hints))

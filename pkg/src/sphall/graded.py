"""Black-box evaluators on C^n, the common currency of mellin and shuffle."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

__all__ = ["GradedEvaluator", "unit"]


@dataclass(frozen=True)
class GradedEvaluator:
    """A degree-n function C^n -> C.

    ``batch`` maps an array of shape (K, n) to an array of shape (K,). Use
    :meth:`from_pointwise` to wrap a function of one n-tuple.
    """

    degree: int
    batch: Callable[[np.ndarray], np.ndarray]
    symmetric: bool = False
    singular_set_hint: str = ""

    @classmethod
    def from_pointwise(cls, degree, func, symmetric=False, singular_set_hint=""):
        def batch(points):
            return np.array([complex(func(*row)) for row in points], dtype=complex)

        return cls(degree, batch, symmetric, singular_set_hint)

    def _points(self, s) -> np.ndarray:
        pts = np.asarray(s, dtype=complex)
        if pts.ndim == 1 and self.degree != 1:
            pts = pts.reshape(1, -1)
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        elif pts.ndim == 0:
            pts = pts.reshape(1, 1)
        if pts.shape[-1] != self.degree:
            raise DomainError(f"expected {self.degree} coordinates, got {pts.shape[-1]}")
        return pts

    def __call__(self, *s) -> complex:
        if len(s) == 1 and np.ndim(s[0]) >= 1:
            s = tuple(s[0])
        if len(s) != self.degree:
            raise DomainError(f"expected {self.degree} coordinates, got {len(s)}")
        return complex(self.batch(np.array([s], dtype=complex).reshape(1, self.degree))[0])

    def many(self, s) -> np.ndarray:
        """Evaluate at many points; ``s`` has shape (K, n) (or (K,) for degree 1)."""
        return np.asarray(self.batch(self._points(s)), dtype=complex)

    def symmetry_defect(self, points) -> float:
        """Largest |F(w s) - F(s)| over all coordinate permutations w."""
        pts = self._points(points)
        base = self.many(pts)
        worst = 0.0
        for perm in itertools.permutations(range(self.degree)):
            worst = max(worst, float(np.max(np.abs(self.many(pts[:, perm]) - base))))
        return worst

    def times(self, other: "GradedEvaluator") -> "GradedEvaluator":
        """Pointwise product of two evaluators of equal degree."""
        if other.degree != self.degree:
            raise DomainError("pointwise product needs equal degrees")
        return GradedEvaluator(self.degree, lambda p: self.batch(p) * other.batch(p),
                               self.symmetric and other.symmetric)


def unit() -> GradedEvaluator:
    """The degree-0 constant 1."""
    return GradedEvaluator(0, lambda p: np.ones(len(p), dtype=complex), True)

"""Numerical laboratory for the spherical Hall algebra of the arithmetic curve.

Submodules: ``specfun`` (Gamma, zeta and kernels), ``qforms`` (lattice
bundles, Hall product, Eisenstein series), ``mellin`` (transforms and test
functions), ``shuffle`` (shuffle algebras), ``permutohedron`` (perturbed
cochain complexes) and ``cli``.
"""

__version__ = "0.1.0"

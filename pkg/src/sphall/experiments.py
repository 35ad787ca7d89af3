"""Numerical experiments shared by the command line and the acceptance suite.

Every function returns a plain dict. Numbers that are compared against a
tolerance are listed under ``criteria`` as ``{name, value, tol, passed}``.
The remaining keys hold the inputs and the raw outputs.
"""

from __future__ import annotations

import math
import time

import numpy as np

from . import mellin, permutohedron, qforms, shuffle, specfun
from .errors import IllConditionedError
from .graded import GradedEvaluator


def criterion(name: str, value: float, tol: float, passed: bool | None = None) -> dict:
    value = float(value)
    ok = bool(value < tol) if passed is None else bool(passed)
    return {"name": name, "value": value, "tol": float(tol), "passed": ok}


def _timed(func):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        out = func(*args, **kwargs)
        out["seconds"] = time.perf_counter() - t0
        return out

    wrapper.__name__ = func.__name__
    wrapper.__doc__ = func.__doc__
    return wrapper


# --------------------------------------------------------------- special functions

FE_GRID = [complex(x, y) for x in (-4.0, -1.7, 0.3, 2.2, 4.0) for y in (-30.0, -8.5, 4.25, 30.0)]


@_timed
def functional_equation_grid(tol: float = 1e-9, points=None) -> dict:
    """max |zeta*(s) - zeta*(1-s)| / |zeta*(s)| and the same for the kernel identities."""
    pts = np.array(FE_GRID if points is None else points, dtype=complex)
    zs = specfun.zeta_star_array(pts)
    zr = specfun.zeta_star_array(1 - pts)
    fe = float(np.max(np.abs(zs - zr) / np.abs(zs)))
    ph = specfun.phi_array(pts) * specfun.phi_array(-pts)
    phi_dev = float(np.max(np.abs(ph - 1)))
    lam = specfun.lambda_big_array(-pts) / specfun.lambda_big_array(pts)
    lam_dev = float(np.max(np.abs(lam - specfun.phi_array(pts)) / np.abs(lam)))
    return {
        "points": pts.tolist(),
        "phi_vertical": phi_vertical_profile(),
        "criteria": [
            criterion("zeta_star_functional_equation", fe, tol),
            criterion("phi_times_phi_reflected", phi_dev, tol),
            criterion("phi_equals_lambda_ratio", lam_dev, tol),
        ],
    }


def phi_vertical_profile(sigmas=(1.5, 2.0, 3.0), t_max: float = 200.0, samples: int = 2001) -> dict:
    """Sampled size of phi on vertical lines Re s = sigma > 1.

    Only boundedness is observed here; no decay rate is asserted. The
    column ``scaled_tail_max`` is max sqrt(t) |phi| over the upper half of
    the range, which stays of order one when phi decays like t^(-1/2).
    """
    t = np.linspace(0.0, t_max, samples)
    rows = []
    for sigma in sigmas:
        v = np.abs(specfun.phi_array(sigma + 1j * t))
        upper = t >= t_max / 2
        rows.append({"sigma": float(sigma), "max_abs": float(v.max()),
                     "max_abs_upper_half": float(v[upper].max()),
                     "scaled_tail_max": float((np.sqrt(t[upper]) * v[upper]).max())})
    return {"t_max": t_max, "samples": samples, "rows": rows}


@_timed
def zeta_zero_scan(t_min: float = 0.0, t_max: float = 30.0, step: float = 0.05, tol: float = 1e-6) -> dict:
    """Zeros of zeta*(1/2 + it), re-run at half the step as a consistency check."""
    first = specfun.find_zeta_zeros(t_min, t_max, step=step)
    second = specfun.find_zeta_zeros(t_min, t_max, step=step / 2)
    crit = [criterion("same_count_at_half_step", abs(len(first) - len(second)), 0.5)]
    if len(first) == len(second) and first:
        crit.append(criterion("half_step_agreement", max(abs(a - b) for a, b in zip(first, second)), tol))
    if first:
        vals = np.abs(specfun.zeta_star_array(0.5 + 1j * np.array(first)))
        crit.append(criterion("zeta_star_at_zeros", float(vals.max()), tol))
    return {"range": [t_min, t_max], "step": step, "ordinates": first, "half_step_ordinates": second,
            "criteria": crit}


# --------------------------------------------------------------- Mellin


def _theta_minus_one(a):
    return specfun.theta_array(np.asarray(a, dtype=float) ** 2) - 1.0


RIEMANN_STRIPS = {"right": 2.0, "critical": 0.5, "left": -1.0}


def riemann_inverse_reference(a: float, strip: str, residues: str = "exact") -> float:
    """theta(a^2) - 1 minus the residue terms picked up when the contour moves left.

    ``residues="exact"`` uses the residues +1 at s = 1 and -1 at s = 0.
    ``residues="sqrt_pi"`` uses +-1/sqrt(pi), the variant with the extra
    factor, kept so the two can be compared side by side.
    """
    base = float(_theta_minus_one(np.array([a]))[0])
    r = 1.0 if residues == "exact" else 1.0 / math.sqrt(math.pi)
    if strip == "right":
        return base
    if strip == "critical":
        return base - r / a
    if strip == "left":
        return base - r / a + r
    raise ValueError(strip)


@_timed
def riemann_formula(tol: float = 1e-6, contour_T: float = 40.0, contour_nodes: int = 801,
                    mellin_tol: float = 1e-10) -> dict:
    """Forward transform of theta(a^2) - 1 against zeta*, and the inverse in three strips."""
    s_pts = [2.0, 3.0, complex(2, 5)]
    forward = mellin.mellin_forward(_theta_minus_one, np.array(s_pts, dtype=complex).reshape(-1, 1),
                                    mellin.QuadConfig(tol=mellin_tol))
    expected = specfun.zeta_star_array(np.array(s_pts, dtype=complex))
    fwd_dev = float(np.max(np.abs(forward - expected)))
    zs = GradedEvaluator(1, lambda p: specfun.zeta_star_array(p[:, 0]))
    rows = []
    for name, sigma0 in RIEMANN_STRIPS.items():
        contour = mellin.VerticalContour((sigma0,), contour_T, contour_nodes)
        for a in (0.8, 1.5):
            val = mellin.mellin_inverse(zs, a, contour, tol=tol / 10)
            rows.append({
                "strip": name, "sigma0": sigma0, "a": a, "value": val,
                "deviation_exact": abs(val - riemann_inverse_reference(a, name, "exact")),
                "deviation_sqrt_pi": abs(val - riemann_inverse_reference(a, name, "sqrt_pi")),
            })
    return {
        "forward": [{"s": s, "value": complex(v), "zeta_star": complex(e)}
                    for s, v, e in zip(s_pts, forward, expected)],
        "inverse": rows,
        "criteria": [
            criterion("forward_vs_zeta_star", fwd_dev, tol),
            criterion("inverse_all_strips_exact_residues", max(r["deviation_exact"] for r in rows), tol),
        ],
        "sqrt_pi_residue_deviation": max(r["deviation_sqrt_pi"] for r in rows),
    }


@_timed
def mellin_roundtrip(tol: float = 1e-9, contour_T: float = 40.0, contour_nodes: int = 801) -> dict:
    """Inverse of the closed-form transform of a log-Gaussian, plus the derivative rule."""
    f = mellin.LogGaussianTestFunction((0.2, -0.1), (0.6, 0.5))
    F = mellin.mellin_closed_form(f)
    pts = np.array([[1.0, 1.0], [0.7, 1.4], [1.6, 0.8]])
    contour = mellin.VerticalContour((0.3, -0.2), 12.0, 97)
    inv = mellin.mellin_inverse(F, pts, contour, tol=tol)
    rt = float(np.max(np.abs(inv - f(pts))))
    fwd = mellin.mellin_forward(f, np.array([[0.5 + 1j, -0.3]]),
                                mellin.QuadConfig(tol=1e-12, center=f.mu, scale=f.sigma))
    fwd_dev = abs(complex(np.atleast_1d(fwd)[0]) - F(0.5 + 1j, -0.3))
    der = mellin.derivative_rule_check(mellin.LogGaussianTestFunction((0.1,), (0.5,)), 0,
                                       mellin.VerticalContour((0.4,), contour_T, contour_nodes))
    return {"criteria": [
        criterion("inverse_of_closed_form", rt, tol),
        criterion("forward_vs_closed_form", fwd_dev, tol),
        criterion("derivative_rule", der["max_abs_dev"], tol),
    ]}


# --------------------------------------------------------------- lattices


def eisenstein_constant_term(y: float, s: complex = 2.0, tol: float = 1e-10, max_nodes: int = 256) -> dict:
    """int_0^1 E(x + iy, s) dx by the periodic trapezoid rule, with node doubling."""
    s = complex(s)
    n = 8
    prev = None
    while True:
        xs = np.arange(n) / n
        cur = float(np.mean([eisenstein_value(complex(x, y), s).real for x in xs]))
        if prev is not None and abs(cur - prev) < tol:
            break
        if n >= max_nodes:
            break
        prev, n = cur, 2 * n
    expected = (y ** s + specfun.zeta_star(2 * s - 1) / specfun.zeta_star(2 * s) * y ** (1 - s)).real
    return {"y": y, "s": s, "nodes": n, "value": cur, "expected": float(expected),
            "deviation": abs(cur - float(expected))}


def eisenstein_value(tau, s) -> complex:
    return qforms.eisenstein_maass(tau, s)


@_timed
def eisenstein_report(tau=complex(0, 1), s: complex = 2.0, tol: float = 1e-6,
                      ys=(0.7, 1.3, 2.0)) -> dict:
    """E(tau, s) by two routes, and its constant term at several heights."""
    tau = complex(tau)
    ewald = qforms.eisenstein_maass(tau, s)
    direct = qforms.eisenstein_maass_direct(tau, s, tol=1e-7)
    rows = [eisenstein_constant_term(y, s) for y in ys]
    return {
        "tau": tau, "s": complex(s), "ewald": ewald, "direct": direct["value"],
        "direct_error_estimate": direct["error_estimate"],
        "constant_terms": rows,
        "criteria": [
            criterion("ewald_vs_direct_sum", abs(ewald - direct["value"]) / abs(ewald),
                      max(10 * direct["error_estimate"] / abs(ewald), 1e-6)),
            criterion("constant_term", max(r["deviation"] for r in rows), tol),
        ],
    }


@_timed
def hall_eisenstein_bridge(tol: float = 1e-8, taus=(complex(0, 1), complex(0.3, 1.1)),
                           differences=(2.5, 3.0), t2: float = 0.0, degree_floor: float = 1e-3) -> dict:
    """Hall product of two degree characters on E_tau against E(tau, (t1 - t2 + 1)/2)."""
    rows = []
    for tau in taus:
        for diff in differences:
            t1 = t2 + diff
            w = (1 + t1 - t2) / 2
            hall = qforms.hall_character_product(t1, t2, qforms.bundle_from_tau(tau), degree_floor)
            ref = qforms.eisenstein_maass(tau, w)
            rows.append({"tau": complex(tau), "t1": t1, "t2": t2, "hall": hall["value"], "eisenstein": ref,
                         "terms": hall["terms"], "relative_deviation": abs(hall["value"] - ref) / abs(ref)})
    return {"rows": rows,
            "criteria": [criterion("hall_vs_eisenstein", max(r["relative_deviation"] for r in rows), tol)]}


# --------------------------------------------------------------- shuffle algebra

QUAD_GRID = [(complex(2.0, 0.5) + d, complex(2.0, 0.5))
             for d in (complex(x, y) for x in (-1.5, -0.6, 0.5, 1.6, 2.5) for y in (-6.0, -1.5, 0.0, 2.5, 9.0))]


@_timed
def quadratic_relations(tol: float = 1e-8, lambdas=(2.0, 3.0)) -> dict:
    """mult2 of the basic relation and of one member of its family, on a 25-point grid."""
    S = np.array(QUAD_GRID, dtype=complex)
    r1 = np.abs(shuffle.mult2(shuffle.quadratic_relation_f11()).many(S))
    r2 = np.abs(shuffle.mult2(shuffle.quadratic_relation_family(*lambdas)).many(S))
    return {"points": S.tolist(), "lambdas": list(lambdas),
            "criteria": [criterion("mult2_f11", float(r1.max()), tol),
                         criterion("mult2_family", float(r2.max()), tol)]}


def random_entire(rng: np.random.Generator, degree: int) -> GradedEvaluator:
    """exp(<b, s> + c sum s_i^2 / 2) times a random linear polynomial; entire in every variable."""
    b = rng.normal(scale=0.4, size=degree) + 1j * rng.normal(scale=0.2, size=degree)
    c = rng.uniform(0.05, 0.2)
    coef = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)

    def batch(S):
        poly = coef[0] + S @ coef[1:]
        return poly * np.exp(S @ b + 0.5 * c * np.sum(S * S, axis=1))

    return GradedEvaluator(degree, batch)


def _random_points(rng, count, dim):
    # keep differences away from 0 and +-1, where the kernels are singular or vanish
    base = rng.uniform(-1.5, 1.5, size=(count, dim)) + 1j * rng.uniform(-4, 4, size=(count, dim))
    return base + 1j * 3.1 * np.arange(dim)[None, :]


@_timed
def shuffle_axioms(seed: int = 0, trials: int = 20, tol: float = 1e-8) -> dict:
    """Associativity of both products and the homomorphism from the symmetric one."""
    rng = np.random.default_rng(seed)
    lam = specfun.make_kernel("LambdaBig")
    worst = {"phi_associativity": 0.0, "lambda_associativity": 0.0, "homomorphism": 0.0,
             "homomorphism_by_multiplication": 0.0}
    for _ in range(trials):
        F, G, H = (random_entire(rng, 1) for _ in range(3))
        S3 = _random_points(rng, 4, 3)
        S2 = _random_points(rng, 4, 2)
        left = shuffle.shuffle_product(shuffle.shuffle_product(F, G), H).many(S3)
        right = shuffle.shuffle_product(F, shuffle.shuffle_product(G, H)).many(S3)
        worst["phi_associativity"] = max(worst["phi_associativity"], _rel(left, right))
        left = shuffle.symmetric_shuffle(shuffle.symmetric_shuffle(F, G), H).many(S3)
        right = shuffle.symmetric_shuffle(F, shuffle.symmetric_shuffle(G, H)).many(S3)
        worst["lambda_associativity"] = max(worst["lambda_associativity"], _rel(left, right))
        star = shuffle.star_to_shuffle(shuffle.symmetric_shuffle(F, G)).many(S2)
        prod = shuffle.shuffle_product(shuffle.star_to_shuffle(F), shuffle.star_to_shuffle(G)).many(S2)
        worst["homomorphism"] = max(worst["homomorphism"], _rel(star, prod))
        # the same map with multiplication instead of division, for comparison
        lam12 = lam.evaluate(S2[:, 0] - S2[:, 1])
        mult = shuffle.symmetric_shuffle(F, G).many(S2) * lam12
        worst["homomorphism_by_multiplication"] = max(worst["homomorphism_by_multiplication"],
                                                      _rel(mult, shuffle.shuffle_product(F, G).many(S2)))
    return {
        "seed": seed, "trials": trials,
        "homomorphism_by_multiplication_deviation": worst["homomorphism_by_multiplication"],
        "criteria": [criterion(k, v, tol) for k, v in worst.items() if k != "homomorphism_by_multiplication"],
    }


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


CH_F1 = mellin.LogGaussianTestFunction((0.1,), (0.45,))
CH_F2 = mellin.LogGaussianTestFunction((-0.2,), (0.5,))
CH_SAMPLES = [(2.2, 0.1), (3.0, 0.5)]


@_timed
def ch_homomorphism(tol: float = 1e-4, f1=CH_F1, f2=CH_F2, samples=CH_SAMPLES) -> dict:
    """Lattice-side Mellin of the Hall product against the shuffle of closed forms."""
    rep = shuffle.ch_homomorphism_check(f1, f2, samples)
    rep["criteria"] = [criterion("pipeline_a_vs_b", rep["max_relative_deviation"], tol)]
    return rep


# --------------------------------------------------------------- permutohedron


@_timed
def wheel_free_statistics(seed: int = 0, count: int = 200, exact_every: int = 2,
                          rank_tol: float = 1e-8) -> dict:
    """Random wheel-free matrices at n = 3, 4: cohomology should be (1, 0, ..., 0)."""
    rng = np.random.default_rng(seed)
    failures, euler_failures, min_gap = [], 0, math.inf
    for k in range(count):
        n = 3 + k % 2
        L = permutohedron.random_wheel_free_matrix(n, rng, exact=(k % exact_every == 0))
        info = permutohedron.cohomology_dims(permutohedron.build_complex(L), rank_tol, details=True)
        if info["dims"] != (1,) + (0,) * (n - 1):
            failures.append({"index": k, "n": n, "dims": info["dims"]})
        euler_failures += not info["euler_ok"]
        min_gap = min([min_gap] + [g for g in info["gaps"] if g is not None])
    return {
        "seed": seed, "count": count, "failures": failures, "min_rank_gap": min_gap,
        "criteria": [criterion("non_point_cohomology", len(failures), 0.5),
                     criterion("euler_mismatches", euler_failures, 0.5)],
    }


@_timed
def wheel_scan(zero_index: int = 0, c_samples=(0, complex(1, 1)), offsets=(0.1, -0.1), cache=None,
               rank_tol: float = 1e-8, gap_min: float = 1e4) -> dict:
    """Cohomology at T = {c, c + rho, c + 1} and at single-point perturbations of it."""
    rep = permutohedron.cubic_relation_scan(zero_index, c_samples, offsets, cache, rank_tol)
    rows = rep["rows"]
    wheel_bad = sum(r["dims"] != (3, 3, 1) for r in rows if r["kind"] == "wheel")
    pert_bad = sum(r["dims"] != (1, 0, 0) for r in rows if r["kind"] == "perturbed")
    gaps = [g for r in rows for g in r["gaps"]]
    return {
        "rho": rep["rho"], "c": [complex(c) for c in c_samples],
        "dims": [list(r["dims"]) for r in rows],
        "ranks": [r["ranks"] for r in rows],
        "singular_value_gaps": [r["gaps"] for r in rows],
        "rows": rows,
        "criteria": [criterion("wheel_dims_not_331", wheel_bad, 0.5),
                     criterion("perturbed_dims_not_100", pert_bad, 0.5),
                     criterion("min_rank_gap", min(gaps), gap_min, passed=min(gaps) > gap_min)],
    }


@_timed
def coincident_point_scan(c: complex = 0.0, gaps=(1e-1, 1e-2, 1e-3, 1e-4), rank_tol: float = 1e-8) -> dict:
    """Cohomology along T = {c, c + eps, c + 1} as eps shrinks toward a coincident pair.

    lambda has a pole at 0, so the coincident configuration itself cannot be
    evaluated; the dims on the approach are reported and nothing is asserted
    about the limit.
    """
    cache = specfun.ZetaZeroCache([], 1.0)
    rows = []
    for eps in gaps:
        pts = [complex(c), complex(c) + eps, complex(c) + 1]
        L = permutohedron.lambda_matrix(pts, cache)
        try:
            info = permutohedron.cohomology_dims(permutohedron.build_complex(L), rank_tol, details=True)
            rows.append({"eps": eps, "dims": info["dims"], "gaps": info["gaps"]})
        except IllConditionedError as exc:
            rows.append({"eps": eps, "dims": None, "error": str(exc)})
    return {"c": complex(c), "rows": rows}


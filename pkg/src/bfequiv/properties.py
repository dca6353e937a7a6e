"""Randomized property checks for the structural claims the calibration
machinery relies on: monotonicity, convexity, invariances, and the
threshold identities.

Each property draws random instances from a seeded stream, so a given
seed yields a byte-identical transcript.  On failure the counterexample
is shrunk toward a baseline instance before reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import bayes_factors as bf
from .calibrate import gamma_from_alpha, gamma_from_lambda, lambda_from_gamma
from .expfamily import normal_mean_model
from .priors import (
    DensityPrior,
    PointMass,
    half_normal_prior,
    solve_pairing,
)
from .problems import OneSidedNormal, SubsetSelection
from .rng import RngStream

__all__ = ["PropertySpec", "PropertyResult", "run_property", "catalogue", "run_catalogue"]

_MODEL = normal_mean_model()


@dataclass(frozen=True)
class PropertySpec:
    name: str
    claim: str
    draw: Callable[[RngStream], dict]
    test: Callable[[dict], Optional[str]]  # None = pass, else failure message
    shrink_keys: tuple = ()
    baseline: dict = field(default_factory=dict)


@dataclass
class PropertyResult:
    name: str
    claim: str
    n_trials: int
    passed: bool
    counterexample: Optional[dict] = None
    message: Optional[str] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        out = f"{status} {self.name} ({self.n_trials} trials): {self.claim}"
        if not self.passed:
            out += f"\n     counterexample: {self.counterexample}\n     {self.message}"
        return out


def _shrink(spec: PropertySpec, case: dict, steps: int = 50) -> dict:
    """Halve each shrinkable value toward its baseline while still failing."""
    current = dict(case)
    for _ in range(steps):
        moved = False
        for key in spec.shrink_keys:
            base = spec.baseline.get(key, 0.0)
            candidate = dict(current)
            candidate[key] = base + 0.5 * (current[key] - base)
            if candidate[key] == current[key]:
                continue
            try:
                if spec.test(candidate) is not None:
                    current = candidate
                    moved = True
            except Exception:
                pass
        if not moved:
            break
    return current


def run_property(spec: PropertySpec, rng: RngStream, n_trials: int = 200) -> PropertyResult:
    for i in range(n_trials):
        case = spec.draw(rng.substream(i))
        message = spec.test(case)
        if message is not None:
            shrunk = _shrink(spec, case)
            return PropertyResult(
                spec.name, spec.claim, i + 1, False, shrunk, spec.test(shrunk) or message
            )
    return PropertyResult(spec.name, spec.claim, n_trials, True)


# ---------------------------------------------------------------------------
# The catalogue


def _u(g, lo, hi):
    return float(g.generator.uniform(lo, hi))


def _p01_monotone_draw(rng):
    g = rng
    kind = "half_normal" if g.generator.uniform() < 0.5 else "exponential"
    return {
        "kind": kind,
        "tau": _u(g, 0.2, 5.0),
        "n": int(g.generator.integers(1, 30)),
        "t1": _u(g, -6.0, 5.0),
        "dt": _u(g, 1e-3, 4.0),
    }


def _p01_monotone_test(c):
    t1, t2 = c["t1"], c["t1"] + c["dt"]
    if c["kind"] == "half_normal":
        b1 = float(bf.bf_one_sided_normal_halfnormal(t1, c["n"], c["tau"]))
        b2 = float(bf.bf_one_sided_normal_halfnormal(t2, c["n"], c["tau"]))
    else:
        b1 = float(bf.bf_one_sided_normal_exponential(t1, c["n"], c["tau"]))
        b2 = float(bf.bf_one_sided_normal_exponential(t2, c["n"], c["tau"]))
    if not b2 > b1:
        return f"B({t2}) = {b2} not above B({t1}) = {b1}"
    return None


def _p02_convex_draw(rng):
    return {
        "tau": _u(rng, 0.2, 5.0),
        "n": int(rng.generator.integers(1, 30)),
        "t1": _u(rng, -8.0, 6.0),
        "dt": _u(rng, 0.1, 4.0),
        "w": _u(rng, 0.05, 0.95),
    }


def _p02_convex_test(c):
    t1, t2, w = c["t1"], c["t1"] + c["dt"], c["w"]
    f = lambda t: float(bf.bf_two_sided_normal_conjugate(t, c["n"], c["tau"]))
    mid = f(w * t1 + (1 - w) * t2)
    chord = w * f(t1) + (1 - w) * f(t2)
    if mid > chord * (1 + 1e-12):
        return f"B at interpolant {mid} exceeds chord {chord}"
    return None


def _p03_pair_equal_draw(rng):
    return {
        "tau": _u(rng, 0.3, 4.0),
        "n": int(rng.generator.integers(1, 15)),
        "gamma": _u(rng, 0.5, 4.0),
    }


def _p03_pair_equal_test(c):
    from .priors import build_symmetric_class_member

    base = half_normal_prior(0.0, c["tau"])
    sym = build_symmetric_class_member(0.0, base, lambda th: -th)
    b_hi = float(bf.bf_two_sided(_MODEL, sym, c["gamma"], c["n"]))
    b_lo = float(bf.bf_two_sided(_MODEL, sym, -c["gamma"], c["n"]))
    if abs(b_hi - b_lo) > 1e-8 * max(b_hi, b_lo):
        return f"B({c['gamma']}) = {b_hi} vs B({-c['gamma']}) = {b_lo}"
    return None


def _p04_tsq_draw(rng):
    n = int(rng.generator.integers(3, 20))
    xbar = _u(rng, 0.01, 1.0)
    ss_c = _u(rng, 1.0, 10.0)
    return {"n": n, "xbar": xbar, "sum_sq": ss_c + n * xbar**2}


_TTEST_CACHE = {}


def _ttest_bf(n: int):
    if n not in _TTEST_CACHE:
        from .priors import ScaledSymmetricPrior, standard_normal_h

        _TTEST_CACHE[n] = bf.TTestBf(ScaledSymmetricPrior(standard_normal_h), n)
    return _TTEST_CACHE[n]


def _p04_tsq_test(c):
    tb = _ttest_bf(c["n"])
    b_pos = float(tb(c["xbar"], c["sum_sq"]))
    b_neg = float(tb(-c["xbar"], c["sum_sq"]))
    if abs(b_pos - b_neg) > 1e-12 * b_pos:
        return f"sign flip changed B: {b_pos} vs {b_neg}"
    t_sq = c["n"] * c["xbar"] ** 2 / ((c["sum_sq"] - c["n"] * c["xbar"] ** 2) / (c["n"] - 1))
    b_t = float(tb.from_t_squared(t_sq))
    if abs(b_pos - b_t) > 1e-9 * b_pos:
        return f"statistic route disagrees: {b_pos} vs {b_t}"
    return None


def _p05_rotation_draw(rng):
    g = rng.generator
    p = int(g.integers(2, 5))
    return {"p": p, "tau": _u(rng, 0.3, 3.0), "t_vec": g.normal(size=p), "seed_q": int(g.integers(1 << 30))}


def _p05_rotation_test(c):
    from .priors import SphericalPrior

    inst = bf.RegressionKnownVarBf(SphericalPrior.gaussian(c["p"], c["tau"]))
    q, _ = np.linalg.qr(np.random.default_rng(c["seed_q"]).normal(size=(c["p"], c["p"])))
    b0 = float(inst(t_vec=c["t_vec"]))
    b1 = float(inst(t_vec=q @ c["t_vec"]))
    if abs(b0 - b1) > 1e-10 * b0:
        return f"rotation changed B: {b0} vs {b1}"
    return None


def _p06_fmono_draw(rng):
    g = rng.generator
    p = int(g.integers(1, 4))
    n = int(g.integers(p + 2, p + 20))
    return {"p": p, "n": n, "tau": _u(rng, 0.3, 3.0), "f1": _u(rng, 0.0, 6.0), "df": _u(rng, 1e-3, 4.0)}


def _p06_fmono_test(c):
    from .priors import SphericalPrior

    ru = bf.RegressionUnknownVarBf(SphericalPrior.gaussian(c["p"], c["tau"]), c["n"])
    b1 = float(ru.from_f(c["f1"]))
    b2 = float(ru.from_f(c["f1"] + c["df"]))
    if not b2 > b1:
        return f"B not increasing in F: {b1} -> {b2}"
    return None


def _p07_2skv_cindep_draw(rng):
    g = rng.generator
    return {
        "n1": int(g.integers(2, 20)),
        "n2": int(g.integers(2, 20)),
        "tau1": _u(rng, 0.3, 3.0),
        "tau2": _u(rng, 0.3, 3.0),
        "c1": _u(rng, 0.1, 10.0),
        "c2": _u(rng, 0.1, 10.0),
        "gamma": _u(rng, 0.2, 4.0),
        "t": _u(rng, 0.0, 8.0),
    }


def _p07_2skv_cindep_test(c):
    decisions = []
    for cc in (c["c1"], c["c2"]):
        rule = bf.TwoSampleKnownVarBf(c["n1"], c["n2"], c["tau1"], c["tau2"], cc)
        lam = float(rule.from_t(c["gamma"]))
        decisions.append(bool(float(rule.from_t(c["t"])) > lam))
    classical = c["t"] > c["gamma"]
    if decisions[0] != decisions[1] or decisions[0] != classical:
        return f"decisions {decisions} vs classical {classical}"
    return None


def _p08_2st_cindep_draw(rng):
    g = rng.generator
    return {
        "n1": int(g.integers(2, 15)),
        "n2": int(g.integers(2, 15)),
        "c1": _u(rng, 0.1, 10.0),
        "c2": _u(rng, 0.1, 10.0),
        "gamma": _u(rng, 0.05, 1.5),
        "t": _u(rng, -2.0, 2.0),
    }


def _p08_2st_cindep_test(c):
    decisions = []
    for cc in (c["c1"], c["c2"]):
        rule = bf.TwoSampleTBf(c["n1"], c["n2"], cc)
        lam = float(rule.from_t(c["gamma"]))
        decisions.append(bool(float(rule.from_t(c["t"])) > lam))
    classical = c["t"] ** 2 > c["gamma"] ** 2
    if decisions[0] != decisions[1] or decisions[0] != classical:
        return f"decisions {decisions} vs classical {classical}"
    return None


def _p09_subset_cindep_draw(rng):
    g = rng.generator
    p1, p2 = int(g.integers(1, 4)), int(g.integers(1, 4))
    n = int(g.integers(p1 + p2 + 2, p1 + p2 + 25))
    return {
        "n": n,
        "p2": p2,
        "c1": _u(rng, 0.1, 10.0),
        "c2": _u(rng, 0.1, 10.0),
        "gamma_t": _u(rng, 0.05, 0.9),
        "t": _u(rng, 0.0, 0.99),
    }


def _p09_subset_cindep_test(c):
    decisions = []
    for cc in (c["c1"], c["c2"]):
        rule = bf.SubsetSelectionBf(c["n"], c["p2"], cc)
        lam = float(rule(c["gamma_t"]))
        decisions.append(bool(float(rule(c["t"])) > lam))
    classical = c["t"] > c["gamma_t"]
    if decisions[0] != decisions[1] or decisions[0] != classical:
        return f"decisions {decisions} vs classical {classical}"
    return None


def _p10_vr_mono_draw(rng):
    g = rng.generator
    kind = "point" if g.uniform() < 0.5 else "density"
    return {
        "kind": kind,
        "theta1": _u(rng, 1.0, 6.0),
        "rate": _u(rng, 0.3, 3.0),
        "n1": int(g.integers(2, 15)),
        "n2": int(g.integers(2, 15)),
        "f1": _u(rng, 0.05, 8.0),
        "df": _u(rng, 1e-3, 4.0),
    }


def _p10_vr_mono_test(c):
    if c["kind"] == "point":
        prior = PointMass(c["theta1"])
    else:
        rate = c["rate"]
        prior = DensityPrior(lambda th: -rate * (th - 1.0), (1.0, np.inf))
    rule = bf.VarianceRatioBf(prior, c["n1"], c["n2"])
    b1, b2 = float(rule(c["f1"])), float(rule(c["f1"] + c["df"]))
    if not b2 > b1:
        return f"B not increasing in F: {b1} -> {b2}"
    return None


def _p11_bstar_draw(rng):
    return {
        "q": _u(rng, 1e-6, 5.0),
        "t": _u(rng, 1e-4, 0.2499),
        "dt": _u(rng, 1e-6, 0.05),
    }


def _p11_bstar_test(c):
    q, t = c["q"], c["t"]
    b_q = float(bf.bf_subjective_variance(q, t))
    b_0 = float(bf.bf_subjective_variance(0.0, t))
    if b_q > b_0:
        return f"B*({q},{t}) = {b_q} above the diffuse limit {b_0}"
    t2 = min(t + c["dt"], 0.2499999)
    if not float(bf.bf_subjective_variance(q, t2)) > b_q:
        return "B* not increasing in T"
    return None


def _p12_pairing_draw(rng):
    return {
        "gamma": _u(rng, 0.5, 4.0),
        "theta": _u(rng, 0.05, 4.0),
        "n": int(rng.generator.integers(1, 10)),
    }


def _p12_pairing_test(c):
    g2, th, n = c["gamma"], c["theta"], c["n"]
    r = solve_pairing(_MODEL, -g2, g2, th, 0.0, n)
    if abs(r + th) > 1e-9 * max(1.0, th):
        return f"mirror of {th} came out {r}, expected {-th}"
    resid = float(_MODEL.pair_sum(-g2, th, r, 0.0, n)) - float(
        _MODEL.pair_sum(g2, th, r, 0.0, n)
    )
    if abs(resid) > 1e-9:
        return f"pairing residual {resid}"
    return None


def _p13_roundtrip_draw(rng):
    return {
        "n": int(rng.generator.integers(1, 20)),
        "tau": _u(rng, 0.3, 4.0),
        "alpha": _u(rng, 0.005, 0.3),
    }


def _p13_roundtrip_test(c):
    problem = OneSidedNormal(n=c["n"])
    bf_of_stat = lambda t: bf.bf_one_sided_normal_halfnormal(t, c["n"], c["tau"])
    region = gamma_from_alpha(problem, c["alpha"])
    lam, _ = lambda_from_gamma(region, bf_of_stat)
    region2, alpha2 = gamma_from_lambda(problem, bf_of_stat, lam)
    if abs(region2.upper - region.upper) > 1e-8 * max(1.0, abs(region.upper)):
        return f"gamma round trip {region.upper} -> {region2.upper}"
    if abs(alpha2 - c["alpha"]) > 1e-8:
        return f"alpha round trip {c['alpha']} -> {alpha2}"
    return None


def _p14_ssdecomp_draw(rng):
    g = rng.generator
    n1, n2 = int(g.integers(2, 20)), int(g.integers(2, 20))
    return {"x1": g.normal(size=n1) * 2.0, "x2": g.normal(1.0, 2.0, size=n2)}


def _p14_ssdecomp_test(c):
    x1, x2 = np.asarray(c["x1"]), np.asarray(c["x2"])
    n1, n2 = len(x1), len(x2)
    m = n1 * n2 / (n1 + n2)
    grand = np.concatenate([x1, x2])
    total = float(np.sum((grand - grand.mean()) ** 2))
    parts = (
        float(np.sum((x1 - x1.mean()) ** 2))
        + float(np.sum((x2 - x2.mean()) ** 2))
        + m * (x2.mean() - x1.mean()) ** 2
    )
    if abs(total - parts) > 1e-9 * max(1.0, total):
        return f"sum-of-squares decomposition off: {total} vs {parts}"
    return None


def _p15_hat_draw(rng):
    g = rng.generator
    p1, p2 = int(g.integers(1, 3)), int(g.integers(1, 3))
    n = int(g.integers(p1 + p2 + 2, p1 + p2 + 15))
    return {
        "n": n,
        "p1": p1,
        "p2": p2,
        "y": g.normal(size=n),
        "X1": g.normal(size=(n, p1)),
        "X2": g.normal(size=(n, p2)),
    }


def _p15_hat_test(c):
    problem = SubsetSelection(n=c["n"], p1=c["p1"], p2=c["p2"])
    s = problem.summarize(c["y"], c["X1"], c["X2"])
    y = np.asarray(c["y"], dtype=float)
    X1 = np.asarray(c["X1"], dtype=float)
    Xf = np.hstack([X1, np.asarray(c["X2"], dtype=float)])
    H1 = X1 @ np.linalg.solve(X1.T @ X1, X1.T)
    H = Xf @ np.linalg.solve(Xf.T @ Xf, Xf.T)
    mid = float(y @ (H - H1) @ y)
    resid = float(y @ (np.eye(c["n"]) - H) @ y)
    if abs(s.rss_null - (mid + resid)) > 1e-8 * max(1.0, s.rss_null):
        return f"null residual does not split: {s.rss_null} vs {mid + resid}"
    if mid < -1e-10:
        return f"projection difference gave negative quadratic form {mid}"
    if abs(s.f - mid / resid) > 1e-9 * max(1.0, abs(s.f)):
        return f"statistic mismatch: {s.f} vs {mid / resid}"
    if not 0.0 <= s.t_stat < 1.0:
        return f"T = F/(1+F) out of range: {s.t_stat}"
    return None


def catalogue() -> list:
    """The standing property catalogue (order is stable)."""
    return [
        PropertySpec(
            "one_sided_monotone",
            "one-sided Bayes factors increase strictly in the statistic",
            _p01_monotone_draw,
            _p01_monotone_test,
            ("dt",),
            {"dt": 1e-3},
        ),
        PropertySpec(
            "two_sided_convex",
            "two-sided conjugate Bayes factor is convex in the statistic",
            _p02_convex_draw,
            _p02_convex_test,
            ("dt",),
            {"dt": 0.1},
        ),
        PropertySpec(
            "two_sided_equal_at_pair",
            "paired symmetric priors give equal B at both critical values",
            _p03_pair_equal_draw,
            _p03_pair_equal_test,
        ),
        PropertySpec(
            "t_test_statistic_function",
            "the t-test Bayes factor depends on data only through t^2",
            _p04_tsq_draw,
            _p04_tsq_test,
        ),
        PropertySpec(
            "radial_rotation_invariant",
            "spherical-prior regression Bayes factor is rotation invariant",
            _p05_rotation_draw,
            _p05_rotation_test,
        ),
        PropertySpec(
            "f_test_monotone",
            "unknown-variance regression Bayes factor increases in F",
            _p06_fmono_draw,
            _p06_fmono_test,
            ("df",),
            {"df": 1e-3},
        ),
        PropertySpec(
            "two_sample_known_var_c_free",
            "two-sample known-variance decisions do not depend on the prior scale c",
            _p07_2skv_cindep_draw,
            _p07_2skv_cindep_test,
        ),
        PropertySpec(
            "two_sample_t_c_free",
            "two-sample t-test decisions do not depend on the prior scale c",
            _p08_2st_cindep_draw,
            _p08_2st_cindep_test,
        ),
        PropertySpec(
            "subset_selection_c_free",
            "subset-selection decisions do not depend on the prior scale c",
            _p09_subset_cindep_draw,
            _p09_subset_cindep_test,
        ),
        PropertySpec(
            "variance_ratio_monotone",
            "variance-ratio Bayes factor increases in F for priors on theta > 1",
            _p10_vr_mono_draw,
            _p10_vr_mono_test,
            ("df",),
            {"df": 1e-3},
        ),
        PropertySpec(
            "subjective_score_bounds",
            "B*(Q,T) never exceeds its diffuse limit B*(0,T) and increases in T",
            _p11_bstar_draw,
            _p11_bstar_test,
        ),
        PropertySpec(
            "pairing_solver_exact",
            "the pairing solver returns the negation for symmetric normal pairs",
            _p12_pairing_draw,
            _p12_pairing_test,
        ),
        PropertySpec(
            "calibration_round_trip",
            "gamma -> lambda -> gamma round trip is the identity",
            _p13_roundtrip_draw,
            _p13_roundtrip_test,
        ),
        PropertySpec(
            "pooled_ss_decomposition",
            "total sum of squares splits into within plus scaled between",
            _p14_ssdecomp_draw,
            _p14_ssdecomp_test,
        ),
        PropertySpec(
            "hat_matrix_split",
            "the null residual splits across the nested projections",
            _p15_hat_draw,
            _p15_hat_test,
        ),
    ]


def run_catalogue(rng: RngStream, n_trials: int = 200):
    """Run every property; returns (results, transcript string)."""
    results = []
    for j, spec in enumerate(catalogue()):
        results.append(run_property(spec, rng.substream(j), n_trials))
    transcript = "\n".join(r.line() for r in results) + "\n"
    return results, transcript

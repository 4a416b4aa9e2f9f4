"""Verification campaigns: parameter sweeps over every inequality and identity.

A check compares a signed, scaled residual ``r`` (positive means the
inequality is violated) against its tolerance. Reports store residuals in
units of that tolerance, so a case is a violation exactly when its residual
exceeds 1.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import functional as fn
from . import operators as ops
from . import scalar as sc
from .core import GridFn
from .legendre import QuadForm
from .quadrature import jacobi_rule

# check id -> the inequality or identity it exercises
CHECKS = {
    "young-refine": "Young gap bracketed by multiples of (sqrt a - sqrt b)^2",
    "heron-sandwich": "geometric <= Heron <= arithmetic",
    "heinz-sandwich": "geometric <= Heinz <= arithmetic",
    "heinz-below-heron": "Heinz mean <= Heron mean at alpha(lambda)",
    "reverse-entropy": "entropy-type lower bound for the Heinz mean",
    "reverse-square": "lower bound for the squared Heinz mean",
    "reverse-new": "sine-weighted lower bound for the Heinz mean",
    "hermite-hadamard": "refined Hermite-Hadamard chain with parameter p",
    "heron-theta": "Heinz <= Heron at theta(lambda) <= arithmetic",
    "gamma-chain": "Heinz <= L_gamma <= K_gamma <= arithmetic",
    "op-young": "weighted geometric <= weighted arithmetic (Loewner)",
    "op-young-refine": "operator Young gap bracketed by r_lambda multiples",
    "op-heron-sandwich": "operator geometric <= Heron <= arithmetic",
    "op-heinz-sandwich": "operator geometric <= Heinz <= arithmetic",
    "op-heron-refine": "Heron bracketed with lambda(1-lambda) multiples",
    "op-heron-refine-r": "Heron bracketed with r_lambda multiples",
    "op-refine-order": "r_lambda bracket is at least as tight as lambda(1-lambda)",
    "op-heinz-lower": "operator Heinz lower bound through J(A, B)",
    "op-gamma-chain": "operator Heinz <= L_gamma <= K_gamma <= arithmetic",
    "fn-sandwich": "functional harmonic <= geometric <= arithmetic",
    "fn-symmetry": "means of (f, g) at lambda equal means of (g, f) at 1 - lambda",
    "fn-heron-refine": "K_r <= K_lambda <= K_(1-r) for functionals",
    "fn-heron-theta": "functional Heinz <= Heron at theta(lambda) <= arithmetic",
    "fn-gap-refine": "functional arithmetic-harmonic gap bracketed by r_lambda multiples",
    "fn-gamma-chain": "functional Heinz <= L_gamma <= K_gamma <= arithmetic",
    "fn-ell-chain": "functional harmonic <= L_lambda <= K_lambda <= arithmetic",
    "fn-theta-chain": "functional harmonic <= Theta_lambda <= Heinz <= arithmetic",
    "fn-heinz-lower": "functional Heinz lower bound through J(f, g)",
    "fn-convex-in-t": "t -> H_t, A_t - H_t, Theta_t have the right midpoint convexity",
    "bridge-geom": "quadratic forms: geometric functional mean equals the form of A#B",
    "bridge-heron-heinz": "quadratic forms: Heron and Heinz means equal the operator forms",
    "young-gap": "Young gap of functionals as an integral of A_t - H_t",
    "young-gap-half": "Young gap at lambda = 1/2 as an integral",
    "heinz-gap": "arithmetic minus Heinz as an integral",
    "j-theta": "J(f, g) as an integral of A - Theta_t",
    "counterexample": "published negative values of f_0.9(t)",
    "h-nonneg": "h(lambda) >= 0",
    "k-nonneg": "k(lambda) >= 0 on [0, 1/2]",
    "open-gap": "alpha_lambda(t) + beta_lambda(t)^2 >= 0, numerical search",
}

PUBLISHED_CX = {0.75: -0.0000722089, 1.5: -0.000197205}

EVIDENCE_NOTE = (
    "numerical evidence only, not a proof: the minimum found by grid search "
    "plus coordinate descent"
)


def _default_lambdas():
    return [0.01] + [round(0.05 * k, 2) for k in range(1, 20)] + [0.99]


def _default_ab():
    return [float(v) for v in np.logspace(-3, 3, 13)]


@dataclass
class SweepConfig:
    lambda_grid: list = field(default_factory=_default_lambdas)
    ab_grid: list = field(default_factory=_default_ab)
    p_grid: list = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    spd_dims: list = field(default_factory=lambda: list(range(2, 9)))
    ensemble_size: int = 200
    seed: int = 42
    nodes: int = 64
    tol: float = 1e-12
    op_tol: float = 1e-8
    fn_tol: float = 1e-6
    functional_size: int = 10
    fn_p_grid: list = field(default_factory=lambda: [0.0, 0.5, 1.0])
    grid_n: int = 257
    grid_lambda_grid: list = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    search_t_points: int = 2000
    search_lambda_points: int = 500
    open_tol: float = 1e-9

    def __post_init__(self):
        for name in ("lambda_grid", "ab_grid", "p_grid", "spd_dims", "fn_p_grid", "grid_lambda_grid"):
            v = list(getattr(self, name))
            if not v:
                raise ValueError(f"{name} must be nonempty")
            setattr(self, name, v)
        if any(not 0 <= v <= 1 for v in self.lambda_grid + self.p_grid + self.fn_p_grid):
            raise ValueError("lambda and p grids must lie in [0, 1]")
        if any(not 0 < v < 1 for v in self.grid_lambda_grid):
            raise ValueError("grid_lambda_grid must lie in (0, 1)")
        if any(v <= 0 for v in self.ab_grid):
            raise ValueError("ab_grid must be positive")
        if any(int(d) != d or d < 1 for d in self.spd_dims):
            raise ValueError("spd_dims must be positive integers")
        self.spd_dims = [int(d) for d in self.spd_dims]
        for name in ("ensemble_size", "nodes", "functional_size", "grid_n",
                     "search_t_points", "search_lambda_points"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass
class Violation:
    check_id: str
    params: dict
    residual: float
    witness: Optional[str] = None


@dataclass
class Report:
    suite: str
    config: dict
    cases_run: int = 0
    violations: list = field(default_factory=list)
    worst_residual: float = -math.inf
    elapsed_s: float = 0.0
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        d = {
            "suite": self.suite,
            "config": self.config,
            "cases_run": self.cases_run,
            "violations": [asdict(v) for v in self.violations],
            "worst_residual": _clean(self.worst_residual),
            "checks": self.checks,
            "notes": self.notes,
            "extra": self.extra,
        }
        d = _clean(d)
        d["elapsed_s"] = round(self.elapsed_s, 6)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        lines = [
            f"suite: {self.suite}",
            f"cases run: {self.cases_run}",
            f"violations: {len(self.violations)}",
            f"worst residual (tolerance units): {self.worst_residual:.3e}",
        ]
        lines += [f"note: {n}" for n in self.notes]
        for k, v in self.extra.items():
            lines.append(f"{k}: {v}")
        if self.checks:
            w = max(len(c) for c in self.checks)
            lines.append("")
            lines.append(f"{'check':<{w}}  {'cases':>8}  {'worst':>11}  {'viol':>5}  equation")
            for cid, c in self.checks.items():
                lines.append(
                    f"{cid:<{w}}  {c['cases']:>8}  {c['worst_residual']:>11.3e}  "
                    f"{c['violations']:>5}  {c['equation']}"
                )
        for v in self.violations[:50]:
            lines.append(f"VIOLATION {v.check_id} {v.params} residual={v.residual:.3e}")
            if v.witness:
                lines.append(v.witness)
        lines.append(f"elapsed: {self.elapsed_s:.3f} s")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        cols = ["check_id", "lambda", "p", "a", "b", "dim", "seed", "residual", "pass"]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)

        def row(cid, params, res, ok):
            w.writerow([cid] + [_csv_cell(params.get(c)) for c in cols[1:7]] + [repr(res), str(ok).lower()])

        for cid, c in self.checks.items():
            row(cid, c["worst_params"], c["worst_residual"], c["violations"] == 0)
        for v in self.violations:
            row(v.check_id, v.params, v.residual, False)
        return buf.getvalue()


def _csv_cell(v):
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def _clean(obj):
    # JSON-safe: numpy scalars to python, non-finite floats to strings
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return x
    return obj


class Tally:
    """Accumulates residual arrays into a :class:`Report`."""

    def __init__(self, report: Report):
        self.report = report

    def add(self, cid: str, residual, tol: float, params: Callable[[tuple], dict],
            witness: Optional[Callable[[tuple], str]] = None):
        """Record signed scaled residuals; ``params(index)`` names a case."""
        if cid not in CHECKS:
            raise KeyError(f"unregistered check id {cid}")
        u = np.asarray(residual, dtype=float) / tol
        if u.size == 0:
            return
        if np.isnan(u).any():
            raise FloatingPointError(f"NaN residual in check {cid}")
        rep = self.report
        rep.cases_run += u.size
        entry = rep.checks.setdefault(
            cid,
            {"equation": CHECKS[cid], "cases": 0, "worst_residual": -math.inf,
             "worst_params": {}, "violations": 0},
        )
        entry["cases"] += int(u.size)
        i = np.unravel_index(int(np.argmax(u)), u.shape)
        worst = float(u[i])
        if worst > entry["worst_residual"]:
            entry["worst_residual"] = worst
            entry["worst_params"] = params(i)
        rep.worst_residual = max(rep.worst_residual, worst)
        for j in zip(*np.nonzero(u > 1)):
            entry["violations"] += 1
            rep.violations.append(
                Violation(cid, params(j), float(u[j]), witness(j) if witness else None)
            )

    def finish(self, t0: float) -> Report:
        rep = self.report
        rep.violations.sort(key=lambda v: (v.check_id, json.dumps(_clean(v.params), sort_keys=True)))
        rep.elapsed_s = time.perf_counter() - t0
        return rep


def _ineq(lo, hi, scale):
    """Residual for ``lo <= hi``."""
    return (lo - hi) / scale


# ---------------------------------------------------------------- scalar


def _hh_functions():
    # convex functions whose Gauss-Legendre means are exact to rounding
    return {
        "t^2": lambda t, a, b: t**2,
        "t^4": lambda t, a, b: t**4,
        "exp(t/b)": lambda t, a, b: np.exp(t / b),
        "exp(-t/b)": lambda t, a, b: np.exp(-t / b),
    }


def run_scalar_suite(cfg: SweepConfig) -> Report:
    t0 = time.perf_counter()
    tally = Tally(Report("scalar", cfg.to_dict()))
    tol = cfg.tol
    av = np.asarray(cfg.ab_grid, float)
    lv = np.asarray(cfg.lambda_grid, float)
    pv = np.asarray(cfg.p_grid, float)
    a = av[:, None, None]
    b = av[None, :, None]
    lam = lv[None, None, :]

    def par(i):
        return {"a": float(av[i[0]]), "b": float(av[i[1]]), "lambda": float(lv[i[2]])}

    scale = 1 + np.abs(a) + np.abs(b)
    am = (a + b) / 2
    gm = np.sqrt(a * b)
    hz = sc.heinz(a, b, lam)
    k = sc.heron(a, b, lam)
    gap = sc.weighted_mean(a, b, lam, "arithmetic") - sc.weighted_mean(a, b, lam, "geometric")
    lower, upper = sc.young_gap_bounds(a, b, lam)
    tally.add("young-refine", np.maximum(_ineq(lower, gap, scale), _ineq(gap, upper, scale)), tol, par)
    tally.add("heron-sandwich", np.maximum(_ineq(gm, k, scale), _ineq(k, am, scale)), tol, par)
    tally.add("heinz-sandwich", np.maximum(_ineq(gm, hz, scale), _ineq(hz, am, scale)), tol, par)
    tally.add("heinz-below-heron", _ineq(hz, sc.heron(a, b, sc.alpha_coef(lam)), scale), tol, par)
    kss, km2, new54 = sc.heinz_reverse_bounds(a, b, lam)
    tally.add("reverse-entropy", _ineq(kss, hz, scale), tol, par)
    tally.add("reverse-square", _ineq(km2, hz**2, scale**2), tol, par)
    tally.add("reverse-new", _ineq(new54, hz, scale), tol, par)
    kth = sc.heron(a, b, sc.theta_coef(lam))
    tally.add("heron-theta", np.maximum(_ineq(hz, kth, scale), _ineq(kth, am, scale)), tol, par)

    # gamma chain, scalar form; needs lambda in (0, 1)
    inner = (lv > 0) & (lv < 1)
    li = lv[inner][None, None, :, None]
    p4 = pv[None, None, None, :]
    a4, b4 = a[..., None], b[..., None]
    gam = sc.gamma_value(li, p4)
    am4 = (a4 + b4) / 2
    hm4 = 2 * a4 * b4 / (a4 + b4)
    L = (1 - gam) * hm4 + gam * am4
    K = (1 - gam) * np.sqrt(a4 * b4) + gam * am4
    hz4 = sc.heinz(a4, b4, li)
    s4 = scale[..., None]
    lin = lv[inner]

    def par4(i):
        return {"a": float(av[i[0]]), "b": float(av[i[1]]), "lambda": float(lin[i[2]]), "p": float(pv[i[3]])}

    tally.add("gamma-chain", np.maximum.reduce([_ineq(hz4, L, s4), _ineq(L, K, s4), _ineq(K, am4, s4)]), tol, par4)

    # Hermite-Hadamard chain over every a < b on the grid
    ia, ib = np.triu_indices(av.size, 1)
    lo_, hi_ = av[ia], av[ib]
    funcs = _hh_functions()
    names = list(funcs)
    res = np.empty((len(names), lo_.size, pv.size))
    for fi, name in enumerate(names):
        phi = funcs[name]
        for j in range(lo_.size):
            aa, bb = lo_[j], hi_[j]
            for q, p in enumerate(pv):
                hb = sc.hh_bounds(lambda t: phi(t, aa, bb), aa, bb, p, nodes=cfg.nodes)
                chain = [hb.midpoint, hb.m, hb.mean_integral, hb.M, hb.endpoint_avg]
                sca = 1 + max(abs(c) for c in chain)
                res[fi, j, q] = max((chain[i] - chain[i + 1]) / sca for i in range(4))

    def par_hh(i):
        return {"a": float(lo_[i[1]]), "b": float(hi_[i[1]]), "p": float(pv[i[2]]), "phi": names[i[0]]}

    tally.add("hermite-hadamard", res, tol, par_hh)

    # psi_lambda on its convex part, where the gamma chain applies the refinement
    res_psi = np.empty((lin.size, pv.size))
    for i, l in enumerate(lin):
        for q, p in enumerate(pv):
            hb = sc.hh_bounds(lambda t: (t / (1 - t)) ** l, (1 - l) / 2, 0.5, p, nodes=cfg.nodes)
            chain = [hb.midpoint, hb.m, hb.mean_integral, hb.M, hb.endpoint_avg]
            res_psi[i, q] = max((chain[k] - chain[k + 1]) / (1 + max(map(abs, chain))) for k in range(4))
    tally.add("hermite-hadamard", res_psi, tol, lambda i: {"lambda": float(lin[i[0]]), "p": float(pv[i[1]]), "phi": "psi"})
    return tally.finish(t0)


# -------------------------------------------------------------- operator


def _pair_rng(seed, dim, tag):
    return np.random.default_rng([seed, dim, tag])


def operator_checks(A, B, lambdas, p_grid):
    """Loewner pairs ``(check_id, tag, T, S)`` asserting ``T <= S`` for one SPD pair."""
    lv = np.asarray(lambdas, float)
    S = ops.sharp_many(A, B, np.concatenate([lv, 1 - lv, [0.5]]))
    n = lv.size
    sh, sh_co, GM = S[:n], S[n : 2 * n], S[-1]
    AM = ops.nabla(A, B, 0.5)
    HM = ops.harm(A, B, 0.5)
    J = ops.j_closed(A, B)
    D = AM - GM
    out = []
    for i, lam in enumerate(lv):
        r = min(lam, 1 - lam)
        nab = ops.nabla(A, B, lam)
        K = (1 - lam) * GM + lam * AM
        HZ = (sh[i] + sh_co[i]) / 2
        out += [
            ("op-young", i, None, sh[i], nab),
            ("op-young-refine", i, None, 2 * r * D, nab - sh[i]),
            ("op-young-refine", i, None, nab - sh[i], 2 * (1 - r) * D),
            ("op-heron-sandwich", i, None, GM, K),
            ("op-heron-sandwich", i, None, K, AM),
            ("op-heinz-sandwich", i, None, GM, HZ),
            ("op-heinz-sandwich", i, None, HZ, AM),
            ("op-heron-refine", i, None, lam * (1 - lam) * D + GM, K),
            ("op-heron-refine", i, None, K, AM - lam * (1 - lam) * D),
            ("op-heron-refine-r", i, None, r * D + GM, K),
            ("op-heron-refine-r", i, None, K, AM - r * D),
            ("op-refine-order", i, None, lam * (1 - lam) * D + GM, r * D + GM),
        ]
        delta = float(sc.delta_coef(lam))
        alpha = float(sc.alpha_coef(lam))
        Kd = (1 - delta) * GM + delta * AM
        out.append(("op-heinz-lower", i, None, Kd - alpha * math.sin(math.pi * lam) / (2 * math.pi) * J, HZ))
        if 0 < lam < 1:
            for q, p in enumerate(p_grid):
                g = float(sc.gamma_value(lam, p))
                Lg = (1 - g) * HM + g * AM
                Kg = (1 - g) * GM + g * AM
                out += [("op-gamma-chain", i, q, HZ, Lg), ("op-gamma-chain", i, q, Lg, Kg), ("op-gamma-chain", i, q, Kg, AM)]
    return out


def run_operator_suite(cfg: SweepConfig) -> Report:
    t0 = time.perf_counter()
    tally = Tally(Report("operator", cfg.to_dict()))
    lv = cfg.lambda_grid
    pv = cfg.p_grid
    for dim in cfg.spd_dims:
        rng = _pair_rng(cfg.seed, dim, 0)
        for k in range(cfg.ensemble_size):
            A = ops.random_spd(rng, dim)
            B = ops.random_spd(rng, dim)
            checks = operator_checks(A, B, lv, pv)
            T = np.stack([c[3] for c in checks])
            S = np.stack([c[4] for c in checks])
            margins = ops.loewner_margins(T, S)
            by_id = {}
            for c, m in zip(checks, margins):
                by_id.setdefault(c[0], []).append((c, m))
            for cid, items in by_id.items():
                res = np.array([-m for _, m in items])

                def par(j, items=items, k=k, dim=dim):
                    c = items[j[0]][0]
                    d = {"dim": dim, "seed": cfg.seed, "pair": k, "lambda": float(lv[c[1]])}
                    if c[2] is not None:
                        d["p"] = float(pv[c[2]])
                    return d

                def wit(j, items=items, A=A, B=B):
                    c = items[j[0]][0]
                    lr = ops.loewner_leq(c[3], c[4], cfg.op_tol)
                    vec = "none" if lr.witness is None else ops.format_matrix(lr.witness[None, :])
                    return (f"A:\n{ops.format_matrix(A)}\nB:\n{ops.format_matrix(B)}\n"
                            f"min eigenvalue: {lr.min_eig!r}\neigenvector:\n{vec}")

                tally.add(cid, res, cfg.op_tol, par, wit)
    return tally.finish(t0)


# ------------------------------------------------------------ functional


def grid_library(n=257, lo=-2.0, hi=2.0) -> dict:
    """Non-quadratic convex pairs used for the grid tier."""
    x = np.linspace(lo, hi, n)
    full = np.ones(n, bool)

    def G(v, dom=full):
        return GridFn(lo, hi, v, dom)

    return {
        "abs|quad": (G(np.abs(x)), G(x**2 / 2)),
        "exp|x^4": (G(np.exp(x)), G(x**4)),
        "ind-quad|ind-quad": (
            G(x**2 / 2, np.abs(x) <= 1 + 1e-12),
            G((x - 0.5) ** 2, np.abs(x - 0.5) <= 1.2 + 1e-12),
        ),
    }


def _fn_relations(pair, lam, p_grid, rules, J, G_half, H_half, A_half):
    """Inequalities ``(check_id, lo, hi)`` meaning ``lo <= hi`` point-wise."""
    s = pair.sample
    lin = fn._lin
    r = min(lam, 1 - lam)
    H = s(fn.harm_fn(pair, lam))
    Hc = s(fn.harm_fn(pair, 1 - lam))
    A = s(fn.arith_fn(pair, lam))
    Ac = s(fn.arith_fn(pair, 1 - lam))
    G = fn.geom_fn(pair, lam, rules[0])
    Gc = G_half if lam == 0.5 else fn.geom_fn(pair, 1 - lam, rules[1])
    HZ = lin(0.5, G, 0.5, Gc)

    def K(mu):
        return lin(1 - mu, G_half, mu, A_half)

    def Lm(mu):
        return lin(1 - mu, H_half, mu, A_half)

    theta = lin(0.5, H, 0.5, Hc)
    out = [
        ("fn-sandwich", H, G), ("fn-sandwich", G, A),
        ("fn-heron-refine", K(r), K(lam)), ("fn-heron-refine", K(lam), K(1 - r)),
        ("fn-heron-theta", HZ, K(float(sc.theta_coef(lam)))), ("fn-heron-theta", K(float(sc.theta_coef(lam))), A_half),
        ("fn-ell-chain", H_half, Lm(lam)), ("fn-ell-chain", Lm(lam), K(lam)), ("fn-ell-chain", K(lam), A_half),
        ("fn-theta-chain", H_half, theta), ("fn-theta-chain", theta, HZ), ("fn-theta-chain", HZ, A_half),
    ]
    gap = _diff(A, H)
    gap_half = _diff(A_half, H_half)
    out += [("fn-gap-refine", lin(2 * r, gap_half, 0, gap_half), gap),
            ("fn-gap-refine", gap, lin(2 * (1 - r), gap_half, 0, gap_half))]
    for p in p_grid:
        g = float(sc.gamma_value(lam, p))
        out += [("fn-gamma-chain", HZ, Lm(g)), ("fn-gamma-chain", Lm(g), K(g)), ("fn-gamma-chain", K(g), A_half)]
    if J is not None:
        d = float(sc.delta_coef(lam))
        al = float(sc.alpha_coef(lam))
        c = al * math.sin(math.pi * lam) / (2 * math.pi)
        out.append(("fn-heinz-lower", K(d) - c * J, HZ))
    return out, {"H": H, "Hc": Hc, "A": A, "Ac": Ac, "G": G, "Gc": Gc}


def _diff(u, v):
    # u - v where v <= u; +inf where either side is +inf
    if isinstance(u, GridFn):
        dom = u.dom & v.dom
        return GridFn(u.lo, u.hi, np.where(dom, u.vals - v.vals, 0.0), dom)
    return u - v


def _residual(lo, hi, scale):
    """Signed violation of ``lo <= hi``; ``+inf`` on the right always holds."""
    if isinstance(lo, GridFn):
        ok_inf = ~hi.dom
        bad_inf = hi.dom & ~lo.dom
        d = np.where(lo.dom & hi.dom, lo.vals - hi.vals, 0.0) / scale
        d = np.where(ok_inf, -np.inf, d)
        return np.where(bad_inf, np.inf, d)
    return (lo - hi) / scale


def _sym_residual(u, v, scale):
    if isinstance(u, GridFn):
        both = u.dom & v.dom
        mismatch = u.dom ^ v.dom
        d = np.where(both, np.abs(u.vals - v.vals), 0.0) / scale
        return np.where(mismatch, np.inf, d)
    return np.abs(u - v) / scale


def _convexity_residuals(pair, scale, ts):
    # second differences of t -> H_t, A_t - H_t, Theta_t on a uniform t-grid
    s = pair.sample
    Hs = [s(fn.harm_fn(pair, float(t))) for t in ts]
    As = [s(fn.arith_fn(pair, float(t))) for t in ts]
    out = []
    for i in range(1, len(ts) - 1):
        mid_H = Hs[i]
        avg_H = fn._lin(0.5, Hs[i - 1], 0.5, Hs[i + 1])
        out.append(_residual(mid_H, avg_H, scale))
        gap_mid = _diff(As[i], Hs[i])
        gap_avg = fn._lin(0.5, _diff(As[i - 1], Hs[i - 1]), 0.5, _diff(As[i + 1], Hs[i + 1]))
        out.append(_residual(gap_avg, gap_mid, scale))
        j = len(ts) - 1 - i
        th_mid = fn._lin(0.5, Hs[i], 0.5, Hs[j])
        th_avg = fn._lin(
            0.5, fn._lin(0.5, Hs[i - 1], 0.5, Hs[j + 1]), 0.5, fn._lin(0.5, Hs[i + 1], 0.5, Hs[j - 1])
        )
        out.append(_residual(th_mid, th_avg, scale))
    return np.stack(out)


def run_functional_suite(cfg: SweepConfig) -> Report:
    t0 = time.perf_counter()
    tally = Tally(Report("functional", cfg.to_dict()))
    tol = cfg.fn_tol
    t_grid = np.linspace(0, 1, 17)

    # quadratic tier
    for dim in cfg.spd_dims:
        rng = _pair_rng(cfg.seed, dim, 1)
        for k in range(cfg.functional_size):
            A = ops.random_spd(rng, dim)
            B = ops.random_spd(rng, dim)
            probes = rng.standard_normal((fn.N_PROBES, dim))
            pair = fn.FnPair(QuadForm(A), QuadForm(B), probes)
            swapped = pair.swapped()
            fx, gx = pair.f(probes), pair.g(probes)
            scale = fx + gx
            J = fn.j_values(pair, cfg.nodes)
            rule_half = jacobi_rule(0.5, cfg.nodes)
            G_half = fn.geom_fn(pair, 0.5, rule_half)
            H_half = pair.sample(fn.harm_fn(pair, 0.5))
            A_half = (fx + gx) / 2
            GM = ops.sharp(A, B, 0.5)
            AMm = ops.nabla(A, B, 0.5)
            base = {"dim": dim, "seed": cfg.seed, "pair": k}
            for lam in cfg.lambda_grid:
                if not 0 < lam < 1:
                    continue
                rules = (jacobi_rule(lam, cfg.nodes), jacobi_rule(1 - lam, cfg.nodes))
                rel, parts = _fn_relations(pair, lam, cfg.fn_p_grid, rules, J, G_half, H_half, A_half)
                params = dict(base, **{"lambda": float(lam)})

                def par(i, params=params):
                    return dict(params, probe=int(i[-1]))

                for cid in dict.fromkeys(c[0] for c in rel):
                    res = np.stack([_residual(lo, hi, scale) for c, lo, hi in rel if c == cid])
                    tally.add(cid, res, tol, par)
                # symmetry relations against the swapped pair
                sym = [
                    _sym_residual(parts["A"], pair.sample(fn.arith_fn(swapped, 1 - lam)), scale),
                    _sym_residual(parts["H"], pair.sample(fn.harm_fn(swapped, 1 - lam)), scale),
                    _sym_residual(parts["G"], fn.geom_fn(swapped, 1 - lam, rules[1]), scale),
                ]
                tally.add("fn-symmetry", np.stack(sym), tol, par)
                # bridges to the operator means
                Gx = QuadForm(ops.sharp(A, B, lam))(probes)
                HZx = QuadForm(ops.heinz_op(A, B, lam))(probes)
                Kx = QuadForm((1 - lam) * GM + lam * AMm)(probes)
                HZf = fn._lin(0.5, parts["G"], 0.5, parts["Gc"])
                Kf = fn._lin(1 - lam, G_half, lam, A_half)
                tally.add("bridge-geom", _sym_residual(parts["G"], Gx, scale), tol, par)
                tally.add("bridge-heron-heinz", np.stack([_sym_residual(HZf, HZx, scale), _sym_residual(Kf, Kx, scale)]), tol, par)
                ids = fn.identity_residuals(pair, lam, cfg.nodes)
                for cid in ("young-gap", "young-gap-half", "heinz-gap", "j-theta"):
                    tally.add(cid, ids[cid], tol, par)
            tally.add("fn-convex-in-t", _convexity_residuals(pair, scale, t_grid), tol,
                      lambda i, base=base: dict(base, probe=int(i[-1])))

    # grid tier
    for name, (f, g) in grid_library(cfg.grid_n).items():
        pair = fn.FnPair(f, g)
        gtol = pair.grid_tol
        swapped = pair.swapped()
        x = f.x
        rule_half = jacobi_rule(0.5, cfg.nodes)
        G_half = fn.geom_fn(pair, 0.5, rule_half)
        H_half = fn.harm_fn(pair, 0.5)
        A_half = fn.arith_fn(pair, 0.5)
        for lam in cfg.grid_lambda_grid:
            rules = (jacobi_rule(lam, cfg.nodes), jacobi_rule(1 - lam, cfg.nodes))
            rel, parts = _fn_relations(pair, lam, [], rules, None, G_half, H_half, A_half)

            def par(i, lam=lam, name=name):
                return {"lambda": float(lam), "pair": name, "x": float(x[i[-1]])}

            for cid in ("fn-sandwich", "fn-heron-refine", "fn-gap-refine", "fn-theta-chain"):
                res = np.stack([_residual(lo, hi, 1.0) for c, lo, hi in rel if c == cid])
                tally.add(cid, res, gtol, par)
            sym = [
                _sym_residual(parts["H"], fn.harm_fn(swapped, 1 - lam), 1.0),
                _sym_residual(parts["G"], fn.geom_fn(swapped, 1 - lam, rules[1]), 1.0),
            ]
            tally.add("fn-symmetry", np.stack(sym), gtol, par)
        tally.add("fn-convex-in-t", _convexity_residuals(pair, 1.0, t_grid), gtol,
                  lambda i, name=name: {"pair": name, "x": float(x[i[-1]])})
    return tally.finish(t0)


# ----------------------------------------------- published numerics


def reproduce_counterexamples(rel_tol=1e-4, h_points=1001, h_margin=1e-15) -> Report:
    t0 = time.perf_counter()
    cfg = {"rel_tol": rel_tol, "h_points": h_points, "h_margin": h_margin}
    tally = Tally(Report("counterexamples", cfg))
    ts = np.array(list(PUBLISHED_CX))
    published = np.array(list(PUBLISHED_CX.values()))
    got = np.array([sc.comparison_fns(t, 0.9).f for t in ts])
    # relative mismatch, and positivity would also break the counterexample
    res = np.maximum(np.abs(got - published) / np.abs(published), np.where(got < 0, 0.0, np.inf))
    tally.add("counterexample", res, rel_tol, lambda i: {"lambda": 0.9, "t": float(ts[i[0]])})
    tally.report.extra["f_0.9"] = {repr(float(t)): repr(float(v)) for t, v in zip(ts, got)}
    lam = np.linspace(0, 1, h_points)
    h = np.asarray(sc.h_fn(lam))
    tally.add("h-nonneg", -h, h_margin, lambda i: {"lambda": float(lam[i[0]])})
    half = lam[lam <= 0.5]
    kv = np.asarray(sc.k_fn(half))
    tally.add("k-nonneg", -kv, h_margin, lambda i: {"lambda": float(half[i[0]])})
    tally.report.extra["min_h"] = float(h.min())
    return tally.finish(t0)


def open_gap(t, lam):
    """``alpha_lambda(t) + beta_lambda(t)**2``."""
    v = sc.comparison_fns(t, lam)
    return np.asarray(v.alpha_t) + np.asarray(v.beta_t) ** 2


def _descend(log_t, lam, lt_lo, lt_hi, sweeps=8):
    best = float(open_gap(math.exp(log_t), lam))
    for _ in range(sweeps):
        r = minimize_scalar(lambda u: float(open_gap(math.exp(u), lam)), bounds=(lt_lo, lt_hi),
                            method="bounded", options={"xatol": 1e-12})
        if r.fun < best:
            best, log_t = float(r.fun), float(r.x)
        r = minimize_scalar(lambda l: float(open_gap(math.exp(log_t), l)), bounds=(0.0, 0.5),
                            method="bounded", options={"xatol": 1e-12})
        if r.fun < best:
            best, lam = float(r.fun), float(r.x)
    return best, log_t, lam


def search_open_inequality(cfg: SweepConfig, t_lo=1e-3, t_hi=1e3, starts=8) -> Report:
    """Look for negative values of ``alpha_lambda(t) + beta_lambda(t)**2``.

    The search never asserts nonnegativity; it reports the smallest value
    it found and where.
    """
    t0 = time.perf_counter()
    conf = cfg.to_dict()
    conf.update({"t_lo": t_lo, "t_hi": t_hi, "starts": starts})
    tally = Tally(Report("search-open", conf))
    t = np.logspace(math.log10(t_lo), math.log10(t_hi), cfg.search_t_points)
    lam = np.linspace(0.0, 0.5, cfg.search_lambda_points)
    vals = open_gap(t[:, None], lam[None, :])
    flat = np.argsort(vals, axis=None, kind="stable")[:starts]
    best = (float(vals.min()), float(t[np.unravel_index(flat[0], vals.shape)[0]]),
            float(lam[np.unravel_index(flat[0], vals.shape)[1]]))
    lt_lo, lt_hi = math.log(t_lo), math.log(t_hi)
    for idx in flat:
        i, j = np.unravel_index(idx, vals.shape)
        v, lt, l = _descend(math.log(t[i]), float(lam[j]), lt_lo, lt_hi)
        if v < best[0]:
            best = (v, math.exp(lt), l)
    tally.add("open-gap", np.array([-best[0]]), cfg.open_tol,
              lambda i: {"t": best[1], "lambda": best[2]})
    rep = tally.report
    rep.notes.append(EVIDENCE_NOTE)
    rep.extra.update({"minimum": best[0], "argmin_t": best[1], "argmin_lambda": best[2],
                      "grid_minimum": float(vals.min())})
    return tally.finish(t0)


def run_all(cfg: SweepConfig) -> Report:
    t0 = time.perf_counter()
    parts = [run_scalar_suite(cfg), run_operator_suite(cfg), run_functional_suite(cfg)]
    rep = Report("all", cfg.to_dict())
    for p in parts:
        rep.cases_run += p.cases_run
        rep.violations += p.violations
        rep.worst_residual = max(rep.worst_residual, p.worst_residual)
        for cid, c in p.checks.items():
            rep.checks[f"{p.suite}/{cid}"] = c
    rep.elapsed_s = time.perf_counter() - t0
    return rep

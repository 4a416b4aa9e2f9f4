"""Functional means of two convex functionals.

Two carriers are supported and never mixed within a pair:

* :class:`~heinzlab.legendre.QuadForm` pairs, whose conjugates are exact.
  Harmonic and arithmetic means stay quadratic forms; geometric, Heron,
  Heinz and the other derived means are returned as arrays of values at
  the pair's probe points.
* :class:`~heinzlab.core.GridFn` pairs on a shared grid, where conjugates
  are taken numerically over a common dual grid. Every mean is returned as
  a ``GridFn`` on the primal grid.
"""

from __future__ import annotations

from functools import cached_property
from typing import Optional, Sequence, Union

import numpy as np

from . import operators as ops
from .core import (
    POS_INF,
    DimMismatch,
    EmptyDomain,
    ExtReal,
    GridFn,
    LambdaMismatch,
    combine,
)
from .legendre import DualGridFn, QuadForm, conjugate_at, lower_hull, slope_range
from .quadrature import DEFAULT_NODES, JacobiRule, jacobi_rule, legendre_on

Sampled = Union[np.ndarray, GridFn]

N_PROBES = 9


def default_probes(dim: int, seed: int = 0, k: int = N_PROBES) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal((k, dim))


class FnPair:
    """A pair ``(f, g)`` of functionals whose effective domains meet.

    For grid pairs, ``dual_m`` sets the number of slopes used for the
    intermediate conjugates (default ``2n - 1``).
    """

    def __init__(self, f, g, probes=None, dual_m: Optional[int] = None):
        if isinstance(f, QuadForm) and isinstance(g, QuadForm):
            if f.dim != g.dim:
                raise DimMismatch(f"{f.dim} vs {g.dim}")
            self.kind = "quad"
            self.probes = (
                default_probes(f.dim) if probes is None else np.atleast_2d(np.asarray(probes, float))
            )
            if self.probes.shape[1] != f.dim:
                raise DimMismatch("probe dimension differs from the forms")
        elif isinstance(f, GridFn) and isinstance(g, GridFn):
            if not f.same_grid(g):
                raise ValueError("grid pair must share one grid")
            if not (f.dom & g.dom).any():
                raise EmptyDomain("dom f and dom g do not meet")
            self.kind = "grid"
            self.probes = f.x
        else:
            raise TypeError("f and g must both be QuadForm or both GridFn")
        self.f = f
        self.g = g
        self.dual_m = dual_m

    @property
    def is_quad(self) -> bool:
        return self.kind == "quad"

    def swapped(self) -> "FnPair":
        return FnPair(self.g, self.f, self.probes if self.is_quad else None, self.dual_m)

    def sample(self, obj) -> Sampled:
        """Values of a mean at the pair's probes (grid means are returned as is)."""
        if isinstance(obj, QuadForm):
            return obj(self.probes)
        return obj

    @cached_property
    def _dual(self):
        # common slope grid and both sampled conjugates on it
        f, g = self.f, self.g
        lo_f, hi_f = slope_range(f)
        lo_g, hi_g = slope_range(g)
        m = self.dual_m or 2 * f.n - 1
        s = np.linspace(min(lo_f, lo_g), max(hi_f, hi_g), m)
        return s, conjugate_at(f, s), conjugate_at(g, s)

    @cached_property
    def _dom_ends(self):
        xf = self.f.x[self.f.dom]
        xg = self.g.x[self.g.dom]
        return (xf[0], xf[-1]), (xg[0], xg[-1])

    @property
    def grid_tol(self) -> float:
        """Error scale ``h * ds`` of one sampled-dual conjugation round trip."""
        s, _, _ = self._dual
        return self.f.h * (s[1] - s[0])


def _lin(c1, v1: Sampled, c2, v2: Sampled) -> Sampled:
    if isinstance(v1, GridFn):
        return combine(v1, c1, v2, c2)
    return c1 * v1 + c2 * v2


def _check_weight(t):
    if not 0 <= t <= 1:
        raise ValueError(f"weight must lie in [0, 1], got {t}")


def arith_fn(pair: FnPair, t: float):
    """``(1-t) f + t g``; ``f`` at ``t = 0`` and ``g`` at ``t = 1`` by convention."""
    _check_weight(t)
    if t == 0:
        return pair.f
    if t == 1:
        return pair.g
    if pair.is_quad:
        return QuadForm(ops.nabla(pair.f.A, pair.g.A, t))
    return combine(pair.f, 1 - t, pair.g, t)


def _grid_harm(pair: FnPair, t: float) -> GridFn:
    s, fs, gs = pair._dual
    dual = DualGridFn(float(s[0]), float(s[-1]), (1 - t) * fs + t * gs, np.ones(s.size, bool))
    x = pair.f.x
    back = conjugate_at(dual, x)
    (af, bf), (ag, bg) = pair._dom_ends
    lo = (1 - t) * af + t * ag
    hi = (1 - t) * bf + t * bg
    slack = 1e-9 * pair.f.h
    dom = (x >= lo - slack) & (x <= hi + slack)
    if not dom.any():
        raise EmptyDomain("harmonic mean has empty domain on this grid")
    return GridFn(pair.f.lo, pair.f.hi, np.where(dom, back, 0.0), dom)


def harm_fn(pair: FnPair, t: float):
    """``((1-t) f* + t g*)*``; ``f`` at ``t = 0`` and ``g`` at ``t = 1`` by convention."""
    _check_weight(t)
    if t == 0:
        return pair.f
    if t == 1:
        return pair.g
    if pair.is_quad:
        return QuadForm(ops.harm(pair.f.A, pair.g.A, t))
    return _grid_harm(pair, t)


def _quad_harm_values(pair: FnPair, ts) -> np.ndarray:
    # values of H_t at every probe, shape (len(ts), n_probes)
    H = ops.harm_many(pair.f.A, pair.g.A, ts)
    x = pair.probes
    return 0.5 * np.einsum("ki,tij,kj->tk", x, H, x)


def _weighted_grid_sum(weights, fns: Sequence[GridFn]) -> GridFn:
    dom = np.logical_and.reduce([h.dom for h in fns])
    if not dom.any():
        raise EmptyDomain("quadrature sum is identically +inf")
    vals = np.zeros(fns[0].n)
    for w, h in zip(weights, fns):
        vals = vals + w * h.vals
    return GridFn(fns[0].lo, fns[0].hi, np.where(dom, vals, 0.0), dom)


def _rule_for(lam: float, rule: Optional[JacobiRule]) -> JacobiRule:
    if rule is None:
        return jacobi_rule(lam, DEFAULT_NODES)
    if rule.lam != lam:
        raise LambdaMismatch(f"rule built for {rule.lam}, mean requested at {lam}")
    return rule


def geom_fn(pair: FnPair, lam: float, rule: Optional[JacobiRule] = None) -> Sampled:
    """Weighted functional geometric mean by Gauss-Jacobi quadrature of ``H_t``."""
    _check_weight(lam)
    if lam == 0:
        return pair.sample(pair.f)
    if lam == 1:
        return pair.sample(pair.g)
    rule = _rule_for(lam, rule)
    if pair.is_quad:
        vals = _quad_harm_values(pair, rule.nodes)
        return rule.weights @ vals
    return _weighted_grid_sum(rule.weights, [_grid_harm(pair, float(t)) for t in rule.nodes])


def heron_fn(pair: FnPair, lam: float, rule: Optional[JacobiRule] = None) -> Sampled:
    """``(1-lam) G(f,g) + lam A(f,g)`` with the unweighted (1/2) means."""
    _check_weight(lam)
    G = geom_fn(pair, 0.5, rule)
    A = pair.sample(arith_fn(pair, 0.5))
    if lam == 0:
        return G
    if lam == 1:
        return A
    return _lin(1 - lam, G, lam, A)


def heinz_fn(pair: FnPair, lam: float, rules=None) -> Sampled:
    """``(G_lam(f,g) + G_{1-lam}(f,g)) / 2``."""
    _check_weight(lam)
    r1, r2 = rules if rules is not None else (None, None)
    if lam in (0.0, 1.0):
        return pair.sample(arith_fn(pair, 0.5))
    if lam == 0.5:
        return geom_fn(pair, 0.5, r1)
    return _lin(0.5, geom_fn(pair, lam, r1), 0.5, geom_fn(pair, 1 - lam, r2))


def theta_fn(pair: FnPair, lam: float) -> Sampled:
    """``(H_lam(f,g) + H_{1-lam}(f,g)) / 2``."""
    _check_weight(lam)
    h1 = pair.sample(harm_fn(pair, lam))
    if lam == 0.5:
        return h1
    return _lin(0.5, h1, 0.5, pair.sample(harm_fn(pair, 1 - lam)))


def ell_fn(pair: FnPair, lam: float) -> Sampled:
    """``(1-lam) H(f,g) + lam A(f,g)``."""
    _check_weight(lam)
    H = pair.sample(harm_fn(pair, 0.5))
    A = pair.sample(arith_fn(pair, 0.5))
    if lam == 0:
        return H
    if lam == 1:
        return A
    return _lin(1 - lam, H, lam, A)


def _grid_index(pair: FnPair, probe) -> int:
    x = pair.f.x
    i = int(np.argmin(np.abs(x - probe)))
    if abs(x[i] - probe) > 1e-9 * pair.f.h:
        raise ValueError(f"probe {probe} is not a grid point")
    return i


def j_values(pair: FnPair, n: int = DEFAULT_NODES) -> Sampled:
    """``J(f,g)``: integral over (0,1) of ``(A_t - H_t) / (t(1-t))`` at every probe."""
    t, w = legendre_on(0.0, 1.0, n)
    if pair.is_quad:
        fx = pair.f(pair.probes)
        gx = pair.g(pair.probes)
        At = (1 - t)[:, None] * fx + t[:, None] * gx
        Ht = _quad_harm_values(pair, t)
        return (w / (t * (1 - t))) @ (At - Ht)
    terms = []
    for ti in t:
        A_t = combine(pair.f, 1 - ti, pair.g, ti)
        H_t = _grid_harm(pair, float(ti))
        dom = A_t.dom & H_t.dom
        terms.append(GridFn(A_t.lo, A_t.hi, np.where(dom, A_t.vals - H_t.vals, 0.0), dom))
    return _weighted_grid_sum(w / (t * (1 - t)), terms)


def j_fn(pair: FnPair, probe, n: int = DEFAULT_NODES) -> ExtReal:
    """``J(f,g)`` at one probe; ``POS_INF`` outside ``dom f`` and ``dom g``."""
    if pair.is_quad:
        sub = FnPair(pair.f, pair.g, probes=np.atleast_2d(probe))
        return float(j_values(sub, n)[0])
    i = _grid_index(pair, probe)
    if not (pair.f.dom[i] and pair.g.dom[i]):
        return POS_INF
    return j_values(pair, n)[i]


def identity_residuals(pair: FnPair, lam: float, n: int = DEFAULT_NODES) -> dict:
    """Residuals of the integral identities at every probe of a quadratic pair.

    Each left side is evaluated from operator closed forms and each right
    side by quadrature, so the two are independent. Residuals are absolute
    differences divided by ``A(f,g)(x)``.
    """
    if not pair.is_quad:
        raise TypeError("identity residuals need exact (quadratic) conjugates")
    if not 0 < lam < 1:
        raise ValueError("identities are stated for lambda in (0, 1)")
    A, B = pair.f.A, pair.g.A
    x = pair.probes

    def form(M):
        return 0.5 * np.einsum("ki,ij,kj->k", x, M, x)

    fx, gx = form(A), form(B)
    amean = (fx + gx) / 2
    scale = np.where(amean > 0, amean, 1.0)

    def gap_sum(rule):
        Ht = _quad_harm_values(pair, rule.nodes)
        At = (1 - rule.nodes)[:, None] * fx + rule.nodes[:, None] * gx
        return rule.weights @ (At - Ht)

    r_lam = jacobi_rule(lam, n)
    r_co = jacobi_rule(1 - lam, n)
    r_half = jacobi_rule(0.5, n)
    S = ops.sharp_many(A, B, [lam, 1 - lam, 0.5])
    g_lam, g_co, g_half = form(S[0]), form(S[1]), form(S[2])

    lhs_gap = (1 - lam) * fx + lam * gx - g_lam
    rhs_gap = gap_sum(r_lam)
    lhs_half = amean - g_half
    rhs_half = gap_sum(r_half)
    lhs_heinz = amean - (g_lam + g_co) / 2
    rhs_heinz = (rhs_gap + gap_sum(r_co)) / 2

    J = form(ops.j_closed(A, B))
    t, w = legendre_on(0.0, 0.5, n)
    Ht = _quad_harm_values(pair, t)
    Hc = _quad_harm_values(pair, 1 - t)
    theta = (Ht + Hc) / 2
    rhs_j = 2 * ((w / (t * (1 - t))) @ (amean[None, :] - theta))

    return {
        "young-gap": np.abs(lhs_gap - rhs_gap) / scale,
        "young-gap-half": np.abs(lhs_half - rhs_half) / scale,
        "heinz-gap": np.abs(lhs_heinz - rhs_heinz) / scale,
        "j-theta": np.abs(J - rhs_j) / scale,
    }

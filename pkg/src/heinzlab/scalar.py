"""Scalar means of two positive numbers and the bounds relating them.

Every function here broadcasts over numpy arrays so that the sweeps in
:mod:`heinzlab.lab` can evaluate whole parameter grids at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .core import BadInterval, EndpointLambda


def _check_pair(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(a > 0) and np.all(b > 0)):
        raise ValueError("means are defined for a, b > 0")
    return a, b


def _check_weight(lam):
    lam = np.asarray(lam, dtype=float)
    if not np.all((lam >= 0) & (lam <= 1)):
        raise ValueError(f"weight must lie in [0, 1], got {lam}")
    return lam


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def weighted_mean(a, b, lam, kind="arithmetic"):
    """The ``lam``-weighted arithmetic, geometric or harmonic mean of a and b."""
    a, b = _check_pair(a, b)
    lam = _check_weight(lam)
    if kind == "arithmetic":
        r = (1 - lam) * a + lam * b
    elif kind == "geometric":
        r = a ** (1 - lam) * b**lam
    elif kind == "harmonic":
        r = 1.0 / ((1 - lam) / a + lam / b)
    else:
        raise ValueError(f"unknown mean kind {kind!r}")
    return _out(r)


def heron(a, b, lam):
    a, b = _check_pair(a, b)
    lam = _check_weight(lam)
    return _out((1 - lam) * np.sqrt(a * b) + lam * (a + b) / 2)


def heinz(a, b, lam):
    a, b = _check_pair(a, b)
    lam = _check_weight(lam)
    return _out((a ** (1 - lam) * b**lam + a**lam * b ** (1 - lam)) / 2)


def r_coef(lam):
    return np.minimum(lam, 1 - lam)


def theta_coef(lam):
    return 1 - np.sin(np.pi * lam)


def alpha_coef(lam):
    return (2 * np.asarray(lam) - 1) ** 2


def delta_coef(lam):
    lam = np.asarray(lam)
    return 1 - 4 * lam * (1 - lam) * np.sin(np.pi * lam)


@dataclass(frozen=True)
class CoeffTable:
    r: float
    theta: float
    alpha: float
    delta: float


def coefficients(lam: float) -> CoeffTable:
    lam = float(_check_weight(lam))
    return CoeffTable(
        r=float(r_coef(lam)),
        theta=float(theta_coef(lam)),
        alpha=float(alpha_coef(lam)),
        delta=float(delta_coef(lam)),
    )


@dataclass(frozen=True)
class GammaPTable:
    p: float
    M_lam: float
    m_lam: float
    Mcal_lam: float
    gamma: float


def big_M(lam, p):
    """Upper Hermite-Hadamard bound for ``(t/(1-t))**lam`` on its concave part."""
    return 0.5 * (
        (p * (1 - lam) / (2 - p * (1 - lam))) ** lam
        + (1 - p) * ((1 - lam) / (1 + lam)) ** lam
    )


def small_m(lam, p):
    """Lower Hermite-Hadamard bound for ``(t/(1-t))**lam`` on its convex part."""
    return p * ((2 - 2 * lam + p * lam) / (2 + 2 * lam - p * lam)) ** lam + (1 - p) * (
        (2 - lam + p * lam) / (2 + lam - p * lam)
    ) ** lam


def cal_M(lam, p):
    return (big_M(lam, p) + small_m(1 - lam, p)) / 2


def gamma_value(lam, p):
    """Vectorised ``gamma_p(lam)``; ``lam`` must avoid the endpoints."""
    return 1 - (2 * np.sin(np.pi * lam) / np.pi) * (
        (1 - lam) * cal_M(lam, p) + lam * cal_M(1 - lam, p)
    )


def gamma_p(lam: float, p: float) -> GammaPTable:
    lam = float(lam)
    p = float(p)
    if lam in (0.0, 1.0):
        raise EndpointLambda("gamma_p is only defined for lambda in (0, 1)")
    _check_weight(lam)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return GammaPTable(
        p=p,
        M_lam=float(big_M(lam, p)),
        m_lam=float(small_m(lam, p)),
        Mcal_lam=float(cal_M(lam, p)),
        gamma=float(gamma_value(lam, p)),
    )


def young_gap_bounds(a, b, lam):
    """Return ``(lower, upper)`` bracketing the Young gap ``a nabla b - a sharp b``."""
    a, b = _check_pair(a, b)
    lam = _check_weight(lam)
    sq = (np.sqrt(a) - np.sqrt(b)) ** 2
    r = r_coef(lam)
    return _out(r * sq), _out((1 - r) * sq)


class ReverseBounds(NamedTuple):
    kss: float
    km2_sq: float
    new54: float


def heinz_reverse_bounds(a, b, lam) -> ReverseBounds:
    """Three lower bounds for the Heinz mean.

    ``km2_sq`` bounds the *square* of the Heinz mean and may be negative.
    """
    a, b = _check_pair(a, b)
    lam = _check_weight(lam)
    am = (a + b) / 2
    ent = (b - a) * np.log(b / a)
    s = np.sin(np.pi * lam)
    kss = am - 0.5 * lam * (1 - lam) * ent
    km2_sq = am**2 - 0.5 * (1 - r_coef(lam)) * (a - b) ** 2
    new54 = (
        am
        - 2 * lam * (1 - lam) * s * (np.sqrt(a) - np.sqrt(b)) ** 2
        - (2 * lam - 1) ** 2 * (s / (2 * np.pi)) * ent
    )
    return ReverseBounds(_out(kss), _out(km2_sq), _out(new54))


def scalar_J(a, b):
    """``(a - b)(log a - log b)``, the scalar form of the J integral."""
    a, b = _check_pair(a, b)
    return _out((a - b) * (np.log(a) - np.log(b)))


def psi(t, lam):
    """``(t / (1 - t))**lam`` on ``(0, 1/2]``."""
    t = np.asarray(t, dtype=float)
    if not np.all((t > 0) & (t <= 0.5)):
        raise ValueError("psi is evaluated on (0, 1/2]")
    return _out((t / (1 - t)) ** lam)


class HHBounds(NamedTuple):
    m: float
    M: float
    midpoint: float
    mean_integral: float
    endpoint_avg: float


def hh_bounds(phi: Callable, a: float, b: float, p: float, nodes: int = 64) -> HHBounds:
    """Refined Hermite-Hadamard quantities of ``phi`` on ``[a, b]``.

    For convex ``phi`` the fields are ordered
    ``midpoint <= m <= mean_integral <= M <= endpoint_avg``; for concave
    ``phi`` the order reverses. ``phi`` must accept numpy arrays.
    """
    from .quadrature import integrate_smooth

    if not a < b:
        raise BadInterval(f"need a < b, got a={a}, b={b}")
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    m = p * phi((p * b + (2 - p) * a) / 2) + (1 - p) * phi(((1 + p) * b + (1 - p) * a) / 2)
    M = 0.5 * (phi(p * b + (1 - p) * a) + p * phi(a) + (1 - p) * phi(b))
    mean = integrate_smooth(phi, a, b, nodes) / (b - a)
    return HHBounds(
        m=float(m),
        M=float(M),
        midpoint=float(phi((a + b) / 2)),
        mean_integral=float(mean),
        endpoint_avg=float((phi(a) + phi(b)) / 2),
    )


def _ratio_over_log(t):
    # (t - 1) / log t with its removable singularity at t = 1
    t = np.asarray(t, dtype=float)
    u = t - 1
    near = np.abs(u) < 1e-6
    safe = np.where(near, 2.0, t)
    direct = (safe - 1) / np.log(safe)
    series = 1 + u / 2 - u**2 / 12
    return np.where(near, series, direct)


def h_fn(lam):
    lam = np.asarray(lam, dtype=float)
    return _out(lam * (1 - lam) - (2 * lam - 1) ** 2 * np.sin(np.pi * lam) / np.pi)


def k_fn(lam):
    lam = np.asarray(lam, dtype=float)
    return _out(
        np.pi - np.pi * (1 - 2 * lam) * np.cos(np.pi * lam) + 4 * np.sin(np.pi * lam)
    )


class ComparisonValues(NamedTuple):
    f: float
    g: float
    h: float
    k: float
    alpha_t: float
    beta_t: float


def comparison_fns(t, lam) -> ComparisonValues:
    """Functions used to compare the reverse Heinz bounds.

    ``f`` and ``g`` compare the new lower bound with the entropy-type one
    at ``a = t**2, b = 1``; ``alpha_t + beta_t**2`` is four times the gap
    between the squared new bound and the squared-Heinz bound at ``a = t, b = 1``.
    """
    t = np.asarray(t, dtype=float)
    if not np.all(t > 0):
        raise ValueError("comparison functions need t > 0")
    lam = _check_weight(lam)
    s = np.sin(np.pi * lam)
    h = lam * (1 - lam) - (2 * lam - 1) ** 2 * s / np.pi
    lt = np.where(t == 1, 0.0, np.log(t))
    g = (t + 1) * h - 2 * lam * (1 - lam) * s * _ratio_over_log(t)
    f = g * (t - 1) * lt
    alpha_t = 2 * (1 - r_coef(lam)) * (t - 1) ** 2 - (t + 1) ** 2
    beta_t = (
        t
        + 1
        - 4 * lam * (1 - lam) * (np.sqrt(t) - 1) ** 2 * s
        - (2 * lam - 1) ** 2 * (t - 1) * lt * s / np.pi
    )
    return ComparisonValues(
        _out(f), _out(g), _out(h), _out(k_fn(lam)), _out(alpha_t), _out(beta_t)
    )

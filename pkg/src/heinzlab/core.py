"""Extended reals and uniformly sampled 1-D functionals.

``POS_INF`` is a tagged sentinel rather than ``float('inf')`` so that the
convex-analysis conventions ``0 * (+inf) = +inf`` and ``(+inf) - (+inf) = +inf``
are applied explicitly and NaN can never appear.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np


class LabError(Exception):
    """Base class for every error raised by the package."""


class FiniteMinusInf(LabError):
    pass


class NegativeScale(LabError):
    pass


class EmptyDomain(LabError):
    pass


class EndpointLambda(LabError):
    pass


class BadInterval(LabError):
    pass


class DimMismatch(LabError):
    pass


class LambdaMismatch(LabError):
    pass


class EigenFailure(LabError):
    pass


class NotSPD(LabError):
    pass


class NaNError(LabError):
    pass


class _PosInf:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "POS_INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_PosInf, ())

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("POS_INF")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


POS_INF = _PosInf()

ExtReal = Union[float, _PosInf]


def is_inf(x) -> bool:
    return x is POS_INF


def as_ext(x) -> ExtReal:
    """Coerce a float (``inf`` allowed) or ``POS_INF`` into an ExtReal."""
    if x is POS_INF:
        return POS_INF
    x = float(x)
    if math.isnan(x):
        raise NaNError("NaN is not an extended real")
    if x == math.inf:
        return POS_INF
    if x == -math.inf:
        raise LabError("negative infinity is outside R u {+inf}")
    return x


def ext_add(x: ExtReal, y: ExtReal) -> ExtReal:
    if x is POS_INF or y is POS_INF:
        return POS_INF
    return as_ext(x + y)


def ext_sub(x: ExtReal, y: ExtReal) -> ExtReal:
    if x is POS_INF:
        return POS_INF
    if y is POS_INF:
        raise FiniteMinusInf(f"{x} - (+inf) is not defined")
    return as_ext(x - y)


def ext_scale(c: float, x: ExtReal) -> ExtReal:
    if c < 0:
        raise NegativeScale(f"scale factor {c} < 0")
    if x is POS_INF:
        return POS_INF
    return as_ext(c * x)


def ext_le(x: ExtReal, y: ExtReal) -> bool:
    if y is POS_INF:
        return True
    if x is POS_INF:
        return False
    return x <= y


@dataclass(frozen=True, eq=False)
class GridFn:
    """A functional sampled at ``n`` uniform points of ``[lo, hi]``.

    ``vals`` holds the finite values; entries where ``dom`` is False are
    ``+inf`` and their ``vals`` slot is a meaningless 0.0.
    """

    lo: float
    hi: float
    vals: np.ndarray
    dom: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.vals, dtype=float)
        dom = np.asarray(self.dom, dtype=bool)
        if not self.lo < self.hi:
            raise BadInterval(f"lo={self.lo} must be < hi={self.hi}")
        if vals.ndim != 1 or vals.shape != dom.shape:
            raise ValueError("vals and dom must be 1-D of equal length")
        if vals.size < 3:
            raise ValueError("a grid function needs at least 3 samples")
        if not dom.any():
            raise EmptyDomain("grid function is identically +inf")
        if np.isnan(vals[dom]).any() or np.isinf(vals[dom]).any():
            raise NaNError("finite samples must be real numbers")
        vals = np.where(dom, vals, 0.0)
        vals.setflags(write=False)
        dom = dom.copy()
        dom.setflags(write=False)
        object.__setattr__(self, "vals", vals)
        object.__setattr__(self, "dom", dom)

    @classmethod
    def from_values(cls, lo, hi, values) -> "GridFn":
        """Build from a sequence of floats / ``inf`` / ``POS_INF``."""
        ext = [as_ext(v) for v in values]
        dom = np.array([v is not POS_INF for v in ext])
        vals = np.array([0.0 if v is POS_INF else v for v in ext])
        return cls(float(lo), float(hi), vals, dom)

    @classmethod
    def from_function(cls, fn: Callable[[float], ExtReal], lo, hi, n) -> "GridFn":
        x = np.linspace(lo, hi, n)
        return cls.from_values(lo, hi, [fn(xi) for xi in x])

    @property
    def n(self) -> int:
        return self.vals.size

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def __len__(self):
        return self.n

    def __getitem__(self, i) -> ExtReal:
        return float(self.vals[i]) if self.dom[i] else POS_INF

    def values(self) -> list:
        return [self[i] for i in range(self.n)]

    def as_float(self) -> np.ndarray:
        """Values with ``+inf`` rendered as IEEE infinity (for display only)."""
        return np.where(self.dom, self.vals, np.inf)

    def same_grid(self, other: "GridFn") -> bool:
        return self.lo == other.lo and self.hi == other.hi and self.n == other.n

    def le(self, other: "GridFn") -> np.ndarray:
        """Point-wise ``self <= other`` under the ExtReal order."""
        if not self.same_grid(other):
            raise ValueError("grid functions live on different grids")
        return ~other.dom | (self.dom & (self.vals <= other.vals))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for xi, v in zip(self.x, self.values()):
            w.writerow([repr(float(xi)), "inf" if v is POS_INF else repr(v)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "GridFn":
        """Parse ``x,value`` CSV text or a path to such a file."""
        text = source
        if isinstance(source, Path) or "\n" not in str(source):
            text = Path(source).read_text()
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
            raise ValueError("grid CSV must start with the header 'x,value'")
        xs, vs = [], []
        for lineno, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"line {lineno}: expected 2 columns")
            xs.append(float(row[0]))
            vs.append(row[1].strip())
        xs = np.array(xs)
        if xs.size >= 2:
            step = np.diff(xs)
            if not np.allclose(step, step[0], rtol=1e-9, atol=1e-12 * np.abs(xs).max()):
                raise ValueError("grid CSV abscissae are not uniform")
        return cls.from_values(xs[0], xs[-1], [math.inf if v == "inf" else float(v) for v in vs])


def combine(f: GridFn, cf: float, g: GridFn, cg: float) -> GridFn:
    """``cf*f + cg*g`` point-wise with ``0 * (+inf) = +inf``."""
    if cf < 0 or cg < 0:
        raise NegativeScale("combination weights must be nonnegative")
    if not f.same_grid(g):
        raise ValueError("grid functions live on different grids")
    dom = f.dom & g.dom
    if not dom.any():
        raise EmptyDomain("dom f and dom g do not meet")
    return GridFn(f.lo, f.hi, cf * f.vals + cg * g.vals, dom)

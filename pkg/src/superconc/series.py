"""Truncated power series and covariance mixtures xi(x) = sum_p c_p x^p."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import partial

import numpy as np
from scipy.special import xlogy

TWO_LOG2 = 2.0 * math.log(2.0)
DEFAULT_ORDER = 64
TAIL_TOL = 1e-10


def series_mul(a, b, order):
    """Product of two coefficient arrays, truncated at x^order."""
    return np.convolve(a, b)[: order + 1]


def entropy_series(order):
    """Coefficients of I(x) = sum_{p>=1} x^{2p} / ((2p-1) 2p)."""
    c = np.zeros(order + 1)
    for p in range(1, order // 2 + 1):
        c[2 * p] = 1.0 / ((2 * p - 1) * (2 * p))
    return c


def entropy_fn(x):
    """I(x) = ((1+x)log(1+x) + (1-x)log(1-x)) / 2 on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (xlogy(1 + x, 1 + x) + xlogy(1 - x, 1 - x))


def critical_xi(x):
    """I(x) / (2 log 2 - I(x)), the largest admissible mixture."""
    i = entropy_fn(x)
    return i / (TWO_LOG2 - i)


def _scaled_critical(scale, x):
    return scale * critical_xi(x)


@dataclass(frozen=True)
class SeriesCoeffs:
    cstar: np.ndarray  # index p holds c_p*, entries 0 and 1 are zero
    order: int

    def partial_sums(self):
        return np.cumsum(self.cstar)


def cstar_coeffs(order: int = DEFAULT_ORDER) -> SeriesCoeffs:
    """Expand I(x)/(2 log 2 - I(x)) = sum_{k>=1} (I/(2 log 2))^k to x^order."""
    if order < 2:
        raise ValueError("order must be at least 2")
    u = entropy_series(order) / TWO_LOG2
    total = np.zeros(order + 1)
    term = np.zeros(order + 1)
    term[0] = 1.0
    # u starts at x^2, so powers beyond order/2 vanish after truncation
    for _ in range(order // 2):
        term = series_mul(term, u, order)
        total += term
    return SeriesCoeffs(total, order)


@dataclass(frozen=True)
class XiSpec:
    """Mixture weights c_p (index p) and, optionally, an exact xi(x).

    ``infinite`` marks mixtures whose stored coefficients are a truncation.
    """

    coeffs: np.ndarray
    closed_form: object = None
    infinite: bool = False
    name: str = ""
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1:
            raise ValueError("coeffs must be one-dimensional")
        if c.size < 3:
            c = np.pad(c, (0, 3 - c.size))
        if np.any(c[:2] != 0):
            raise ValueError("mixture weights start at p = 2")
        if np.any(c < 0):
            raise ValueError("mixture weights must be nonnegative")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.strict:
            total = float(self(1.0)) if self.closed_form is not None else float(c.sum())
            if abs(total - 1.0) > TAIL_TOL:
                raise ValueError(f"mixture weights sum to {total}, not 1")

    @classmethod
    def from_weights(cls, weights: dict, strict=True, name=""):
        pmax = max(weights)
        c = np.zeros(pmax + 1)
        for p, w in weights.items():
            if p < 2:
                raise ValueError("mixture weights start at p = 2")
            c[p] = w
        return cls(c, strict=strict, name=name)

    @classmethod
    def from_function(cls, coef, tol=TAIL_TOL, max_order=100_000, name=""):
        """Truncate an infinite mixture once the remaining mass is below tol."""
        c = [0.0, 0.0]
        total = 0.0
        p = 2
        while 1.0 - total >= tol:
            if p > max_order:
                raise ValueError("mixture tail does not fall below tolerance")
            w = float(coef(p))
            c.append(w)
            total += w
            p += 1
        return cls(np.array(c), infinite=True, strict=False, name=name)

    @classmethod
    def critical(cls, order=DEFAULT_ORDER, scale=1.0):
        s = cstar_coeffs(order)
        return cls(
            scale * s.cstar,
            closed_form=partial(_scaled_critical, scale),
            infinite=True,
            strict=scale == 1.0,
            name="cstar" if scale == 1.0 else f"{scale:g}cstar",
        )

    @property
    def max_degree(self):
        nz = np.flatnonzero(self.coeffs)
        return int(nz[-1]) if nz.size else 0

    @property
    def is_even(self):
        return not np.any(self.coeffs[1::2])

    @property
    def finite(self):
        return not self.infinite

    def __call__(self, x):
        if self.closed_form is not None:
            return self.closed_form(x)
        x = np.asarray(x, dtype=float)
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def __str__(self):
        if self.name:
            return self.name
        return "+".join(f"{w:g}x^{p}" for p, w in enumerate(self.coeffs) if w)


_TERM = re.compile(r"^(?P<w>[0-9.eE+-]*?)\*?x(\^(?P<p>\d+))?$")


def parse_xi(text: str) -> XiSpec:
    """Parse ``x^2``, ``0.5x^2+0.5x^4``, ``0.5*x^2+0.5*x^3`` or ``cstar``."""
    s = text.replace(" ", "")
    if s == "cstar":
        return XiSpec.critical()
    weights = {}
    for term in s.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"bad mixture term {term!r}")
        w = float(m.group("w")) if m.group("w") not in ("", None) else 1.0
        p = int(m.group("p") or 1)
        weights[p] = weights.get(p, 0.0) + w
    return XiSpec.from_weights(weights, name=s)

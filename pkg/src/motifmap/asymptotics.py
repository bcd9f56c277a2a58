"""Divergence rate of logMAP at the true alignment.

For ``m`` exact motif instances of width ``w`` in ``N`` letters, with
``m/N -> c``, background letter frequencies ``theta0`` and motif letter
composition ``k``, logMAP at the truth grows like ``r N`` where

    r = c log c + sum_i (theta0_i - k_i c w) log(theta0_i - k_i c w)
        - sum_i theta0_i log theta0_i - [1 - c(w-1)] log[1 - c(w-1)]

(``0 log 0 = 0``).  This module evaluates ``r`` and its special cases,
builds ``(c, w)`` grids, and estimates empirical rates from simulated scores.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import DomainViolation, TooFewPoints, ValidationError

_DOMAIN_TOL = 1e-12


def _xlogx(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < -_DOMAIN_TOL):
        raise DomainViolation("negative argument to x log x")
    x = np.clip(x, 0.0, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)


@dataclass(frozen=True)
class MotifProfile:
    c: float
    w: int
    theta0: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        theta0 = np.asarray(self.theta0, dtype=float)
        k = np.asarray(self.k, dtype=float)
        object.__setattr__(self, "theta0", theta0)
        object.__setattr__(self, "k", k)
        if theta0.shape != k.shape:
            raise ValidationError("theta0 and k must have the same length")
        if abs(theta0.sum() - 1.0) > 1e-9 or np.any(theta0 < 0):
            raise ValidationError("theta0 must be a probability vector")
        if self.w < 1:
            raise ValidationError("width must be positive")
        if not 0 <= self.c < 1.0 / self.w:
            raise DomainViolation("motif proportion c must satisfy 0 <= c < 1/w")
        if np.any(theta0 - k * self.c * self.w < -_DOMAIN_TOL):
            raise DomainViolation("theta0_i - k_i c w must be non-negative")

    @property
    def d(self) -> int:
        return self.theta0.size

    @classmethod
    def symmetric(cls, c, w, d=4) -> "MotifProfile":
        u = np.full(d, 1.0 / d)
        return cls(c, w, u, u)


def _shared_terms(c, w):
    return float(_xlogx(c) - _xlogx(1.0 - c * (w - 1)))


def map_df(profile: MotifProfile) -> float:
    p = profile
    return (_shared_terms(p.c, p.w)
            + float(_xlogx(p.theta0 - p.k * p.c * p.w).sum())
            - float(_xlogx(p.theta0).sum()))


def _check_cw(c, w):
    if c < 0 or w < 1 or c * w >= 1:
        raise DomainViolation("need 0 <= c and c w < 1")


def map_df_symmetric(c, w, d=4) -> float:
    """Divergence factor for uniform background and equal letter contribution."""
    _check_cw(c, w)
    cw = c * w
    return _shared_terms(c, w) + float(_xlogx(1.0 - cw)) + cw * np.log(d)


def map_df_repeat(c, w, d=4) -> float:
    """Single-letter "repeat" motif on a uniform background, with ``k_1 = d``, ``k_i = 0`` otherwise."""
    _check_cw(c, w)
    if c * w >= 1.0 / d ** 2:
        raise DomainViolation("repeat motif needs c w < 1/d^2")
    return _shared_terms(c, w) + np.log(d) / d + float(_xlogx(1.0 / d - d * c * w))


def map_df_max(c, w, d=4) -> float:
    """Stated supremum of ``map_df`` over profiles at fixed ``(c, w, d)``.

    The value is that of the uniform profile ``theta0 = k = 1/d``.  That point
    is stationary on the product of simplices but it is a saddle, not a
    maximum: shifting ``k`` away from uniform at fixed uniform ``theta0``
    increases ``r`` (see ``composition_objective``).
    """
    return map_df_symmetric(c, w, d)


def composition_objective(theta0, k, c, w) -> float:
    """``F(theta0, k) = sum (theta0_i - k_i c w) log(theta0_i - k_i c w) - sum theta0_i log theta0_i``."""
    theta0 = np.asarray(theta0, dtype=float)
    k = np.asarray(k, dtype=float)
    return float(_xlogx(theta0 - k * c * w).sum() - _xlogx(theta0).sum())


def multi_motif_df(rho, kappa, w, rho_next) -> float:
    """Rate at which logMAP gains from adding a truly present new motif word.

    ``rho`` are letter usage probabilities under the current dictionary
    (normalised over letters), ``kappa`` the new motif's letter composition and
    ``rho_next`` its sites per letter word.  The last term enters with a minus
    sign so that, with no pre-existing motif, the value coincides with
    :func:`map_df` at ``theta0 = rho``, ``k = kappa``, ``c = rho_next``.
    """
    rho = np.asarray(rho, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    if abs(kappa.sum() - 1.0) > 1e-9 or np.any(kappa < 0):
        raise ValidationError("kappa must sum to 1")
    if w > 1 and not 0 < rho_next < 1.0 / (w - 1):
        raise DomainViolation("need 0 < rho_next < 1/(w-1)")
    if rho_next <= 0:
        raise DomainViolation("need rho_next > 0")
    depleted = rho - kappa * w * rho_next
    if np.any(depleted < -_DOMAIN_TOL):
        raise DomainViolation("rho_i - kappa_i w rho_next must be non-negative")
    return float((_xlogx(depleted) - _xlogx(rho)).sum() + _xlogx(rho_next)
                 - _xlogx(1.0 - (w - 1) * rho_next))


class GridRow(NamedTuple):
    c: float
    w: int
    r: float  # NaN marks a cell outside the domain
    profile: str
    max: float = float("nan")


def df_grid(c_values: Iterable[float], w_values: Iterable[int], profile_kind: str = "symmetric",
            d: int = 4, theta0=None, k=None, include_max: bool = False) -> list:
    """Divergence factor over a ``(c, w)`` grid, ``w``-major then ``c``.

    ``profile_kind`` is ``symmetric``, ``repeat`` or ``custom`` (the latter
    needs ``theta0`` and ``k``).  Cells outside the domain get ``r = nan``.
    """
    c_values = [float(c) for c in c_values]
    w_values = [int(w) for w in w_values]
    if not c_values or not w_values:
        raise ValidationError("grid ranges must be non-empty")
    if profile_kind == "custom":
        if theta0 is None or k is None:
            raise ValidationError("custom profile needs theta0 and k")
        d = len(theta0)
    elif profile_kind not in ("symmetric", "repeat"):
        raise ValidationError(f"unknown profile kind {profile_kind!r}")

    def value(c, w):
        if profile_kind == "symmetric":
            return map_df_symmetric(c, w, d)
        if profile_kind == "repeat":
            return map_df_repeat(c, w, d)
        return map_df(MotifProfile(c, w, theta0, k))

    rows = []
    for w in w_values:
        for c in c_values:
            try:
                r = value(c, w)
            except DomainViolation:
                r = float("nan")
            bound = float("nan")
            if include_max:
                try:
                    bound = map_df_max(c, w, d)
                except DomainViolation:
                    pass
            rows.append(GridRow(c, w, float(r), profile_kind, bound))
    return rows


def write_grid_csv(rows, fh, include_max: bool = False) -> None:
    def fmt(x):
        return "" if np.isnan(x) else f"{x:.12g}"

    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["c", "w", "r", "profile"] + (["max"] if include_max else []))
    for row in rows:
        out = [f"{row.c:.12g}", row.w, fmt(row.r), row.profile]
        if include_max:
            out.append(fmt(row.max))
        writer.writerow(out)


def empirical_rate(points) -> float:
    """Least-squares slope of logMAP against sequence length from ``(N, logMAP)`` pairs."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise TooFewPoints("need at least three (N, logMAP) points")
    if np.any(np.diff(pts[:, 0]) <= 0):
        raise ValidationError("N values must be strictly increasing")
    slope, _ = np.polyfit(pts[:, 0], pts[:, 1], 1)
    return float(slope)

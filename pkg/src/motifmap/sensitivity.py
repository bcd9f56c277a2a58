"""Prior robustness of the MAP criterion.

Global sensitivity uses the epsilon-contamination class
``pi = (1 - eps) pi0 + eps q`` over the product-Dirichlet prior of the motif
columns: posterior means mix with weight ``lambda = (1-eps) m(x|pi0) / m(x|pi)``
and the MAP score mixes linearly on the probability scale.  Local
sensitivity uses analytic derivatives of posterior means and of logMAP with
respect to the pseudo-counts.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gammaln, logsumexp

from .errors import (
    DimensionMismatch,
    MultiMotifUnsupported,
    NonPositivePseudoCount,
    PseudoCountSumNotOne,
    ValidationError,
)
from .model import CountSummary, PriorSpec
from .scoring import MapScoreValue, log_map

SUM_TOL = 1e-9


def lambda_weight(epsilon, log_m_pi0, log_m_q) -> float:
    """Posterior weight of the base prior, ``(1-eps) m0 / ((1-eps) m0 + eps mq)``."""
    if epsilon <= 0:
        return 1.0
    if epsilon >= 1:
        return 0.0
    return float(expit(np.log1p(-epsilon) - np.log(epsilon) + log_m_pi0 - log_m_q))


def contaminated_map(epsilon, map_pi0, map_q) -> float:
    """``log[(1-eps) MAP_pi0 + eps MAP_q]`` from the two log scores."""
    a = float(map_pi0.log_map if isinstance(map_pi0, MapScoreValue) else map_pi0)
    b = float(map_q.log_map if isinstance(map_q, MapScoreValue) else map_q)
    if epsilon <= 0:
        return a
    if epsilon >= 1:
        return b
    return float(np.logaddexp(np.log1p(-epsilon) + a, np.log(epsilon) + b))


def _as_components(gamma):
    """Normalise a gamma vector or ``[(weight, gamma), ...]`` to a component list."""
    if isinstance(gamma, PriorSpec):
        return [(wt, comp.gamma) for wt, comp in gamma.components]
    if isinstance(gamma, (list, tuple)) and gamma and isinstance(gamma[0], tuple):
        comps = [(float(wt), np.asarray(g, dtype=float)) for wt, g in gamma]
    else:
        comps = [(1.0, np.asarray(gamma, dtype=float))]
    for _, g in comps:
        if np.any(g <= 0):
            raise NonPositivePseudoCount("gamma pseudo-counts must be positive")
    return comps


def column_log_marginal(counts, gamma) -> float:
    """``log m(C | PD(gamma))`` for a ``(d, w)`` column count matrix (letters in order)."""
    C = np.asarray(counts, dtype=float)
    g = np.asarray(gamma, dtype=float)
    if C.ndim != 2 or C.shape[0] != g.size:
        raise DimensionMismatch("counts must be (d, w) with d = len(gamma)")
    cg = C + g[:, None]
    w = C.shape[1]
    return float(gammaln(cg).sum() - gammaln(cg.sum(axis=0)).sum()
                 + w * (gammaln(g.sum()) - gammaln(g).sum()))


def _mixture_log_marginal(C, comps) -> tuple:
    logs = np.array([column_log_marginal(C, g) for _, g in comps])
    weights = np.array([wt for wt, _ in comps])
    return float(logsumexp(logs, b=weights)), logs


def posterior_mean(counts, gamma) -> np.ndarray:
    """Posterior mean of the motif columns; a mixture prior gives a mixture of means."""
    C = np.asarray(counts, dtype=float)
    comps = _as_components(gamma)
    total, logs = _mixture_log_marginal(C, comps)
    out = np.zeros_like(C)
    for (wt, g), lg in zip(comps, logs):
        post = C + g[:, None]
        out += wt * np.exp(lg - total) * post / post.sum(axis=0)
    return out


def contaminated_posterior_mean(counts, gamma, delta, epsilon, closed_form: bool = False) -> np.ndarray:
    """Posterior mean of the motif columns under ``(1-eps) PD(gamma) + eps PD(delta)``.

    ``gamma`` may be a vector or a list of ``(weight, gamma)`` components.
    With ``closed_form`` the single-Dirichlet expansion valid when
    ``sum(gamma) = sum(delta) = 1`` is used instead of the general mixture.
    """
    C = np.asarray(counts, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if np.any(delta <= 0):
        raise NonPositivePseudoCount("delta pseudo-counts must be positive")
    comps = _as_components(gamma)
    if closed_form:
        if len(comps) != 1:
            raise ValidationError("closed form needs a single Dirichlet base prior")
        g = comps[0][1]
        if abs(g.sum() - 1.0) > SUM_TOL or abs(delta.sum() - 1.0) > SUM_TOL:
            raise PseudoCountSumNotOne("closed form requires sum(gamma) = sum(delta) = 1")
        return _closed_form_mean(C, g, delta, epsilon)
    lm0, _ = _mixture_log_marginal(C, comps)
    lmq = column_log_marginal(C, delta)
    lam = lambda_weight(epsilon, lm0, lmq)
    mean0 = posterior_mean(C, comps)
    post_q = C + delta[:, None]
    return lam * mean0 + (1.0 - lam) * post_q / post_q.sum(axis=0)


def _closed_form_mean(C, g, delta, epsilon):
    # theta_ij = [c_ij + g_j + (1 - lambda)(delta_j - g_j)] / (sum_j c_ij + 1)
    if epsilon <= 0:
        one_minus_lam = 0.0
    elif epsilon >= 1:
        one_minus_lam = 1.0
    else:
        log_ratio = float((gammaln(C + g[:, None]) - gammaln(C + delta[:, None])
                           + gammaln(delta[:, None]) - gammaln(g[:, None])).sum())
        one_minus_lam = float(expit(-(np.log1p(-epsilon) - np.log(epsilon) + log_ratio)))
    num = C + g[:, None] + one_minus_lam * (delta - g)[:, None]
    return num / (C.sum(axis=0) + 1.0)


@dataclass(frozen=True)
class DeltaGrid:
    """Contaminating Dirichlet parameters indexed by ``delta* = delta_A + delta_T``.

    ``delta_A = delta_T = delta*/2`` and ``delta_C = delta_G = (1 - delta*)/2``
    (DNA order A, C, G, T) so that every ``delta`` sums to 1.
    """

    delta_star: tuple

    def __post_init__(self):
        ds = tuple(float(x) for x in self.delta_star)
        if not ds:
            raise ValidationError("delta grid must be non-empty")
        if any(not 0 < x < 1 for x in ds):
            raise ValidationError("delta* values must lie in (0, 1)")
        object.__setattr__(self, "delta_star", ds)

    @classmethod
    def uniform(cls, points: int = 99) -> "DeltaGrid":
        return cls(tuple(np.arange(1, points + 1) / (points + 1)))

    @property
    def deltas(self) -> np.ndarray:
        ds = np.array(self.delta_star)
        return np.column_stack([ds / 2, (1 - ds) / 2, (1 - ds) / 2, ds / 2])

    def __len__(self):
        return len(self.delta_star)


@dataclass(frozen=True)
class ContaminationSpec:
    epsilon: float
    base: PriorSpec
    contaminant: PriorSpec

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValidationError("epsilon must lie in (0, 1)")

    def log_map(self, counts: CountSummary) -> float:
        return contaminated_map(self.epsilon, log_map(counts, self.base), log_map(counts, self.contaminant))


@dataclass(frozen=True)
class SensitivityReport:
    epsilon: float
    delta_star: np.ndarray
    theta_star: np.ndarray  # (grid, w) per-column maximal posterior frequencies
    d_m: np.ndarray
    d_k: np.ndarray
    d_e: np.ndarray
    log_map: np.ndarray

    @property
    def log_map_range(self) -> tuple:
        return float(self.log_map.min()), float(self.log_map.max())

    @property
    def spread(self) -> float:
        lo, hi = self.log_map_range
        return hi - lo

    def summary(self) -> dict:
        lo, hi = self.log_map_range
        return {"epsilon": self.epsilon, "log_map_min": lo, "log_map_max": hi,
                "log_map_range": hi - lo, "d_m_max": float(self.d_m.max()),
                "d_k_max": float(self.d_k.max()), "d_e_mean": float(self.d_e.mean())}


def delta_grid_profile(counts, gamma, grid: DeltaGrid, epsilon, offset: float = 0.0) -> SensitivityReport:
    """Distance measures and contaminated logMAP across a ``delta*`` grid.

    ``counts`` is a ``(d, w)`` motif column count matrix and ``gamma`` the base
    column prior (vector or mixture components).  ``log_map`` holds
    ``offset + log[(1-eps) m(C|pi0) + eps m(C|q_delta)]``; pass the word-usage
    plus background part of a full logMAP as ``offset`` (see
    :func:`log_map_offset`) to get absolute levels, since only the column
    prior changes across the grid.
    """
    C = np.asarray(counts, dtype=float)
    if C.shape[0] != 4:
        raise DimensionMismatch("delta grid is defined for DNA (d = 4)")
    comps = _as_components(gamma)
    lm0, _ = _mixture_log_marginal(C, comps)
    stars, logs = [], []
    for delta in grid.deltas:
        theta = contaminated_posterior_mean(C, comps, delta, epsilon)
        stars.append(theta.max(axis=0))
        logs.append(offset + contaminated_map(epsilon, lm0, column_log_marginal(C, delta)))
    stars = np.array(stars)
    mean = stars.mean(axis=0)
    w = C.shape[1]
    d_m = ((stars - mean) ** 2).sum(axis=1) / w
    d_k = (stars * np.log(stars / mean)).sum(axis=1)
    d_e = -(stars * np.log(stars)).sum(axis=1)
    return SensitivityReport(float(epsilon), np.array(grid.delta_star), stars, d_m, d_k, d_e,
                             np.array(logs))


def log_map_offset(counts: CountSummary, priors: PriorSpec) -> float:
    """Word-usage plus background part of logMAP, the part the column prior does not touch."""
    value = log_map(counts, priors)
    return value.word_usage + value.background


def column_prior(kind: str, total: float = 1.0, composition=None) -> list:
    """Base column priors as ``[(weight, gamma), ...]``.

    ``equal``: symmetric Dirichlet.  ``data``: pseudo-counts proportional to
    ``composition``.  ``mix3``: AT-rich, GC-rich and uniform components.
    ``mix9``: uniform plus single-letter-biased components at two strengths
    (0.55 and 0.85 on one letter).  All components have pseudo-count sum ``total``.
    """
    if kind == "equal":
        return [(1.0, np.full(4, total / 4))]
    if kind == "data":
        if composition is None:
            raise ValidationError("data prior needs a letter composition")
        comp = np.asarray(composition, dtype=float)
        comp = np.clip(comp, 1e-3, None)
        return [(1.0, total * comp / comp.sum())]
    if kind == "mix3":
        shapes = [np.array([0.35, 0.15, 0.15, 0.35]), np.array([0.15, 0.35, 0.35, 0.15]),
                  np.full(4, 0.25)]
        return [(1.0 / 3, total * s) for s in shapes]
    if kind == "mix9":
        shapes = []
        for strength in (0.55, 0.85):
            for i in range(4):
                s = np.full(4, (1 - strength) / 3)
                s[i] = strength
                shapes.append(s)
        shapes.append(np.full(4, 0.25))
        return [(1.0 / 9, total * s) for s in shapes]
    raise ValidationError(f"unknown prior kind {kind!r}")


def write_report_csv(reports, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["delta_star", "epsilon", "d_m", "d_k", "d_e", "log_map"])
    for rep in reports:
        for i, ds in enumerate(rep.delta_star):
            writer.writerow([f"{ds:.12g}", f"{rep.epsilon:.12g}", f"{rep.d_m[i]:.12g}",
                             f"{rep.d_k[i]:.12g}", f"{rep.d_e[i]:.12g}", f"{rep.log_map[i]:.12g}"])


# local sensitivity

def dmu_dbeta(N, beta0, j: int, i: int) -> float:
    """Derivative of the posterior mean of ``rho_j`` with respect to ``beta_i``.

    Bounded by ``1 / sum(N + beta)`` in absolute value, hence by 1 once the
    posterior total is at least 1 (any data set with one word or more).
    """
    N = np.asarray(N, dtype=float)
    beta0 = np.asarray(beta0, dtype=float)
    if N.shape != beta0.shape:
        raise DimensionMismatch("N and beta0 must have the same length")
    post = N + beta0
    total = post.sum()
    if i == j:
        return float((total - post[j]) / total ** 2)
    return float(-post[j] / total ** 2)


def dlogmap_dgamma(counts, gamma, j: int) -> float:
    """Stirling-based approximation of d logMAP / d gamma_j for one motif's ``(d, w)`` counts."""
    C = np.asarray(counts, dtype=float)
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0):
        raise NonPositivePseudoCount("gamma pseudo-counts must be positive")
    if C.ndim != 2 or C.shape[0] != g.size:
        raise DimensionMismatch("counts must be (d, w) with d = len(gamma)")
    w = C.shape[1]
    cj = C[j] + g[j]
    col_tot = (C + g[:, None]).sum(axis=0)
    data_part = np.sum(np.log(cj / col_tot) - 0.5 * (1.0 / cj - 1.0 / col_tot))
    gs = g.sum()
    prior_part = w * (np.log(gs / g[j]) - 0.5 * (1.0 / gs - 1.0 / g[j]))
    return float(data_part + prior_part)


def dlogmap_dbeta(counts: CountSummary, beta0, k: int) -> float:
    """Stirling-based d logMAP / d beta_k for a single-motif dictionary.

    The null model shares the letter pseudo-counts (``alpha = beta0[:d]``).
    ``k`` is 0-based; ``k = D - 1`` is the motif word.
    """
    if counts.n_motifs != 1:
        raise MultiMotifUnsupported("local beta sensitivity is derived for one motif type")
    beta = np.asarray(beta0, dtype=float)
    if beta.size != counts.D:
        raise DimensionMismatch("beta0 must have length D")
    if np.any(beta <= 0):
        raise NonPositivePseudoCount("beta0 pseudo-counts must be positive")
    D = counts.D
    N1 = counts.word_counts
    N0 = counts.total_letter_counts
    s1 = (N1 + beta).sum()  # sum_{j<=D} (N1j + beta_j)
    s0 = (N0 + beta[:-1]).sum()  # sum_{j<D} (N0j + beta_j)
    b_all = beta.sum()
    b_letters = beta[:-1].sum()
    if k < D - 1:
        return float(np.log(N1[k] / N0[k])
                     + 0.5 * (N1[k] - N0[k]) / ((N1[k] + beta[k]) * (N0[k] + beta[k]))
                     + np.log(s0 / s1) + np.log(b_all / b_letters)
                     + 0.5 * (N0.sum() - N1.sum() - beta[-1]) / (s1 * s0)
                     + 0.5 * (1.0 / b_letters - 1.0 / b_all))
    if k == D - 1:
        nd = N1[-1] + beta[-1]
        return float(np.log(nd / s1) - 0.5 * (N1[:-1] + beta[:-1]).sum() / (nd * s1)
                     + np.log1p(b_letters / beta[-1]) + 0.5 * (1.0 / beta[-1] - 1.0 / b_all))
    raise DimensionMismatch(f"k={k} outside 0..{D - 1}")


def motif_beta_dominates(beta0) -> bool:
    """True when ``beta_D`` exceeds the summed letter pseudo-counts.

    In that regime the letter pseudo-counts can have unbounded influence on
    logMAP; otherwise their influence is negligible.
    """
    beta = np.asarray(beta0, dtype=float)
    return bool(beta[-1] > beta[:-1].sum())

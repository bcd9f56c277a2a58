"""Competing model-selection criteria: AIC, BIC, KLI and compositional KL."""
from __future__ import annotations

import csv
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .errors import SupportMismatch, ZeroBackgroundProbability
from .likelihood import sequence_loglik
from .model import Alignment, Dictionary, Pwm, PriorSpec, Sequence, derive_counts
from .scoring import log_map


def kli(pwm: Pwm, theta0) -> float:
    """Kullback-Leibler information of a motif against the background, summed over columns."""
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.shape != (pwm.d,) or np.any(theta0 <= 0):
        raise ZeroBackgroundProbability("background probabilities must be strictly positive")
    theta = pwm.theta
    return float((xlogy(theta, theta) - xlogy(theta, theta0[:, None])).sum())


def composition_kl(p, q) -> float:
    """``sum_j p_j log(p_j / q_j)``: motif composition ``p`` against background ``q``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise SupportMismatch("p and q must have the same length")
    if np.any((p > 0) & (q <= 0)):
        raise SupportMismatch("q must be positive wherever p is")
    return float((xlogy(p, p) - xlogy(p, np.where(q > 0, q, 1.0))).sum())


def aic(loglik, n_params) -> float:
    return -2.0 * loglik + 2.0 * n_params


def bic(loglik, n_params, n) -> float:
    if n < 1:
        raise ValueError("BIC needs a sample size n >= 1")
    return float(-2.0 * loglik + n_params * np.log(n))


def motif_model_params(d: int, widths) -> int:
    """Free parameters: ``(d-1) w`` per motif plus ``D - 1`` word usage probabilities."""
    widths = list(widths)
    return (d - 1) * sum(widths) + (d + len(widths) - 1)


class CriterionRow(NamedTuple):
    criterion: str
    model: str
    score: float


def posterior_mean_dictionary(seq: Sequence, widths, align: Alignment, priors: PriorSpec) -> Dictionary:
    """Dictionary at the posterior means of ``rho`` and ``Theta`` given an alignment."""
    shell = Dictionary(seq.alphabet, tuple(Pwm(np.full((seq.alphabet.d, w), 1.0 / seq.alphabet.d))
                                           for w in widths),
                       np.full(seq.alphabet.d + len(widths), 1.0 / (seq.alphabet.d + len(widths))))
    counts = derive_counts(seq, shell, align)
    rho = counts.word_counts + priors.beta0
    motifs = []
    for c in counts.column_counts:
        post = c + priors.gamma[:, None]
        motifs.append(Pwm(post / post.sum(axis=0)))
    return Dictionary(seq.alphabet, tuple(motifs), rho / rho.sum())


def compare_criteria(seq: Sequence, widths, align: Alignment, priors: PriorSpec,
                     bic_n: int | None = None) -> list:
    """AIC, BIC, KLI and logMAP for the null model and the motif model.

    Log-likelihoods are exact (summed over all segmentations) at plug-in
    parameters: letter frequencies for the null model and posterior means
    given ``align`` for the motif model.  ``bic_n`` defaults to the sequence
    length.
    """
    n = seq.n
    bic_n = n if bic_n is None else bic_n
    d = seq.alphabet.d
    freqs = seq.letter_counts() / n
    null_ll = float(xlogy(seq.letter_counts(), freqs).sum())
    fitted = posterior_mean_dictionary(seq, widths, align, priors)
    motif_ll = sequence_loglik(seq, fitted)
    k_null, k_motif = d - 1, motif_model_params(d, widths)
    counts = derive_counts(seq, fitted, align)
    bg = counts.background_counts / max(counts.background_counts.sum(), 1.0)
    bg = np.where(bg > 0, bg, 1.0 / n)
    bg = bg / bg.sum()
    kli_total = sum(kli(m, bg) for m in fitted.motifs)
    rows = [
        CriterionRow("loglik", "null", null_ll),
        CriterionRow("loglik", "motif", motif_ll),
        CriterionRow("AIC", "null", aic(null_ll, k_null)),
        CriterionRow("AIC", "motif", aic(motif_ll, k_motif)),
        CriterionRow("BIC", "null", bic(null_ll, k_null, bic_n)),
        CriterionRow("BIC", "motif", bic(motif_ll, k_motif, bic_n)),
        CriterionRow("KLI", "null", 0.0),
        CriterionRow("KLI", "motif", kli_total),
        CriterionRow("logMAP", "null", 0.0),
        CriterionRow("logMAP", "motif", log_map(counts, priors).log_map),
    ]
    return rows


def write_criteria_csv(rows, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["criterion", "model", "score"])
    for row in rows:
        writer.writerow([row.criterion, row.model, f"{row.score:.12g}"])

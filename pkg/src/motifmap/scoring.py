"""logMAP scores, the exhaustive Bayes-factor numerator and the Stirling expansion.

For an alignment ``A`` the MAP score compares the motif model's joint
marginal ``p(S, A | M1)`` against the null marginal ``p(S | M0)``.  With
``logDN(v) = sum log Gamma(v_i) - log Gamma(sum v)`` (the log normaliser of a
Dirichlet) and letters counted in the order they occur, every marginal is a
difference of ``logDN`` terms:

    logMAP(A) = [logDN(N + beta0) - logDN(beta0)]                  word usage
              - [logDN(N0 + alpha) - logDN(alpha)]                 null model
              + sum_k sum_j [logDN(c_jk + gamma) - logDN(gamma)]   motif columns

where ``N0`` are the raw letter tallies (background letters plus all letters
covered by sites).  All logarithms are natural.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import CountsTooSmall, DimensionMismatch, InstanceTooLarge, NonPositivePseudoCount
from .model import Alignment, CountSummary, PriorSpec, Sequence, count_sites

DEFAULT_CAP = 10 ** 6
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


def log_dirichlet_norm(v) -> float:
    """``sum_i log Gamma(v_i) - log Gamma(sum_i v_i)``; log of the Dirichlet(v) normaliser."""
    v = np.asarray(v, dtype=float)
    if v.size == 0 or np.any(v <= 0) or not np.all(np.isfinite(v)):
        raise NonPositivePseudoCount("Dirichlet parameters must be positive and finite")
    return float(gammaln(v).sum() - gammaln(v.sum()))


def _ldn_cols(m) -> np.ndarray:
    # column-wise logDN of a (d, w) matrix; callers guarantee positivity
    return gammaln(m).sum(axis=0) - gammaln(m.sum(axis=0))


@dataclass(frozen=True)
class MapScoreValue:
    log_map: float
    word_usage: float
    background: float
    motif_columns: float

    def __float__(self):
        return self.log_map


def _check_dims(counts: CountSummary, priors: PriorSpec):
    if counts.D != priors.D or counts.d != priors.d:
        raise DimensionMismatch(
            f"counts have D={counts.D}, d={counts.d}; priors have D={priors.D}, d={priors.d}")


def null_log_marginal(letter_counts, alpha) -> float:
    """``log p(S | M0)`` for i.i.d. letters under a Dirichlet(alpha) prior."""
    letter_counts = np.asarray(letter_counts, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    return log_dirichlet_norm(letter_counts + alpha) - log_dirichlet_norm(alpha)


def _components(counts: CountSummary, priors: PriorSpec):
    word = log_dirichlet_norm(counts.word_counts + priors.beta0) - log_dirichlet_norm(priors.beta0)
    null = null_log_marginal(counts.total_letter_counts, priors.alpha)
    g = priors.gamma[:, None]
    cols = 0.0
    if counts.n_motifs:
        prior_norm = log_dirichlet_norm(priors.gamma)
        for c in counts.column_counts:
            cols += float(_ldn_cols(c + g).sum()) - c.shape[1] * prior_norm
    return word, -null, cols


def log_map(counts: CountSummary, priors: PriorSpec) -> MapScoreValue:
    """logMAP of the alignment summarised by ``counts``.

    For a mixture prior the score is ``log sum_m w_m MAP_m``.  Its word-usage
    and background components are then evaluated under the top-level
    ``beta0``/``alpha`` and ``motif_columns`` carries the remainder, so the
    three components still add up to ``log_map``.
    """
    _check_dims(counts, priors)
    if not priors.mixture:
        word, bg, cols = _components(counts, priors)
        return MapScoreValue(word + bg + cols, word, bg, cols)
    weights = np.array([wt for wt, _ in priors.mixture])
    values = np.array([sum(_components(counts, comp)) for _, comp in priors.mixture])
    total = float(logsumexp(values, b=weights))
    word, bg, _ = _components(counts, priors)
    return MapScoreValue(total, word, bg, total - word - bg)


def log_joint(counts: CountSummary, priors: PriorSpec) -> float:
    """``log p(S, A | M1)`` for the alignment summarised by ``counts``."""
    return log_map(counts, priors).log_map + null_log_marginal(counts.total_letter_counts, priors.alpha)


def count_alignments(seq: Sequence, widths, limit: int | None = None) -> int:
    """Number of valid alignments (including the empty one) for the given motif widths.

    With ``limit`` the count saturates at ``limit + 1``, which is enough to
    decide whether an instance is too large without big-integer growth.
    """
    seg = seq.segment_starts()
    a = [1] + [0] * seq.n
    for i in range(1, seq.n + 1):
        total = a[i - 1]
        for w in widths:
            s = i - w
            if s >= 0 and s >= seg[i - 1]:
                total += a[s]
        a[i] = total if limit is None else min(total, limit + 1)
    return a[seq.n]


def enumerate_alignments(seq: Sequence, widths, cap: int = DEFAULT_CAP):
    """Yield every valid alignment of motifs with the given widths.

    Raises ``InstanceTooLarge`` before yielding anything if there are more than ``cap``.
    """
    if count_alignments(seq, widths, limit=cap) > cap:
        raise InstanceTooLarge(f"more than {cap} alignments; exhaustive enumeration refused")
    seg = seq.segment_starts()
    n = seq.n

    def walk(pos, acc):
        if pos >= n:
            yield Alignment(tuple(acc))
            return
        yield from walk(pos + 1, acc)
        for k, w in enumerate(widths):
            end = pos + w
            if end <= n and seg[pos] == seg[end - 1]:
                acc.append((pos, k))
                yield from walk(end, acc)
                acc.pop()

    yield from walk(0, [])


def _motif_marginal(counts: CountSummary, comp: PriorSpec) -> float:
    # log p(S, A | M1) written directly as a ratio of gamma-function products
    lg = gammaln
    nb = counts.word_counts + comp.beta0
    val = lg(nb).sum() - lg(nb.sum()) + lg(comp.beta0.sum()) - lg(comp.beta0).sum()
    for c in counts.column_counts:
        cg = c + comp.gamma[:, None]
        val += (lg(cg).sum() - lg(cg.sum(axis=0)).sum()
                + c.shape[1] * (lg(comp.gamma.sum()) - lg(comp.gamma).sum()))
    return float(val)


def exact_bayes_numerator(seq: Sequence, priors: PriorSpec, widths, cap: int = DEFAULT_CAP) -> float:
    """``log sum_A p(A, S | M1)`` by exhaustive enumeration of alignments."""
    widths = tuple(int(w) for w in widths)
    if priors.n_motifs != len(widths) or priors.d != seq.alphabet.d:
        raise DimensionMismatch("priors must have one beta0 entry per motif width")
    comps = priors.components
    log_w = np.log([wt for wt, _ in comps])
    terms = []
    for align in enumerate_alignments(seq, widths, cap):
        counts = count_sites(seq.data, seq.alphabet.d, widths, align.starts, align.kinds)
        terms.append(logsumexp([lw + _motif_marginal(counts, comp) for lw, (_, comp) in zip(log_w, comps)]))
    return float(logsumexp(terms))


def _stirling_lgamma(z):
    # log Gamma(z) = log (z-1)! ~ (z-1) log(z-1) - (z-1) + 0.5 log(2 pi (z-1))
    y = np.asarray(z, dtype=float) - 1.0
    return y * np.log(y) - y + 0.5 * np.log(2.0 * np.pi * y)


def stirling_log_map(counts: CountSummary, priors: PriorSpec) -> float:
    """logMAP with Stirling's formula applied to every data-bearing gamma term.

    Terms that involve only pseudo-counts (the constant ``k(alpha, beta, gamma)``)
    are kept exact.  Requires every word count, letter tally and motif column
    count to be at least 2.  Agreement with :func:`log_map` improves as counts
    grow; at counts of 2 the gap is of order 0.1 per gamma term.
    """
    _check_dims(counts, priors)
    if priors.mixture:
        raise NonPositivePseudoCount("Stirling expansion is defined for a single Dirichlet prior")
    arrays = [counts.word_counts, counts.total_letter_counts, *counts.column_counts]
    if any(np.any(a < 2) for a in arrays):
        raise CountsTooSmall("Stirling expansion needs every count >= 2")
    st = _stirling_lgamma
    nb = counts.word_counts + priors.beta0
    word = st(nb).sum() - st(nb.sum()) + gammaln(priors.beta0.sum()) - gammaln(priors.beta0).sum()
    n0 = counts.total_letter_counts + priors.alpha
    null = st(n0).sum() - st(n0.sum()) + gammaln(priors.alpha.sum()) - gammaln(priors.alpha).sum()
    cols = 0.0
    g = priors.gamma
    for c in counts.column_counts:
        cg = c + g[:, None]
        cols += st(cg).sum() - st(cg.sum(axis=0)).sum() + c.shape[1] * (gammaln(g.sum()) - gammaln(g).sum())
    return float(word - null + cols)

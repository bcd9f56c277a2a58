"""Exact sequence likelihood under a stochastic dictionary.

The likelihood sums over every segmentation of the sequence into dictionary
words.  The forward table ``L[i] = log P(x_1..x_i)`` obeys

    L[i] = logsumexp( L[i-1] + log rho(x_i),
                      L[i-w_k] + log rho_k + log P(x_{i-w_k+1..i} | Theta_k)  for each motif k )

with a motif word available at ``i`` only when its whole window lies inside
one record.  Alignments are drawn from ``P(A | S, Theta, rho)`` by sampling
backwards through the table.
"""
from __future__ import annotations

import numba
import numpy as np
from scipy.special import xlogy

from .errors import DimensionMismatch, EmptyDictionary, ZeroLikelihood
from .model import Alignment, CountSummary, Dictionary, Sequence

NEG_INF = -np.inf


@numba.njit(cache=True)
def _lae(a, b):
    if a == -np.inf:
        return b
    if b == -np.inf:
        return a
    if a > b:
        return a + np.log1p(np.exp(b - a))
    return b + np.log1p(np.exp(a - b))


@numba.njit(cache=True, nogil=True)
def _forward(letter_lp, word_lp, widths, seg_start):
    n = letter_lp.shape[0]
    L = np.empty(n + 1)
    L[0] = 0.0
    for i in range(1, n + 1):
        acc = L[i - 1] + letter_lp[i - 1]
        for k in range(widths.shape[0]):
            s = i - widths[k]
            if s >= seg_start[i - 1]:
                acc = _lae(acc, L[s] + word_lp[k, s])
        L[i] = acc
    return L


@numba.njit(cache=True, nogil=True)
def _backward_sample(L, letter_lp, word_lp, widths, seg_start, uniforms):
    n = letter_lp.shape[0]
    K = widths.shape[0]
    starts = np.empty(n, dtype=np.int64)
    kinds = np.empty(n, dtype=np.int64)
    weights = np.empty(K + 1)
    m = 0
    i = n
    t = 0
    while i > 0:
        weights[0] = np.exp(L[i - 1] + letter_lp[i - 1] - L[i])
        for k in range(K):
            s = i - widths[k]
            if s >= seg_start[i - 1]:
                weights[k + 1] = np.exp(L[s] + word_lp[k, s] - L[i])
            else:
                weights[k + 1] = 0.0
        total = 0.0
        for j in range(K + 1):
            total += weights[j]
        u = uniforms[t] * total
        t += 1
        choice = K
        acc = 0.0
        for j in range(K + 1):
            acc += weights[j]
            if u < acc:
                choice = j
                break
        while choice > 0 and weights[choice] == 0.0:
            choice -= 1
        if choice == 0:
            i -= 1
        else:
            k = choice - 1
            i -= widths[k]
            starts[m] = i
            kinds[m] = k
            m += 1
    return starts[:m][::-1].copy(), kinds[:m][::-1].copy()


def _tables(seq: Sequence, dictionary: Dictionary):
    if seq.alphabet.d != dictionary.d:
        raise DimensionMismatch("sequence and dictionary alphabets differ")
    if not np.any(dictionary.rho > 0):
        raise EmptyDictionary("dictionary has no word with positive probability")
    x = seq.data
    n = x.size
    with np.errstate(divide="ignore"):
        log_rho = np.log(dictionary.rho)
        letter_lp = log_rho[: dictionary.d][x]
        widths = np.array(dictionary.widths, dtype=np.int64)
        word_lp = np.full((len(widths), max(n, 1)), NEG_INF)
        for k, pwm in enumerate(dictionary.motifs):
            w = pwm.w
            if w > n:
                continue
            log_theta = np.log(pwm.theta)
            span = n - w + 1
            acc = np.full(span, log_rho[dictionary.d + k])
            for j in range(w):
                acc = acc + log_theta[x[j: j + span], j]
            word_lp[k, :span] = acc
    return letter_lp, word_lp, widths, seq.segment_starts()


def forward_table(seq: Sequence, dictionary: Dictionary) -> np.ndarray:
    """Log partial likelihoods ``L[0..n]`` with ``L[0] = 0``."""
    letter_lp, word_lp, widths, seg = _tables(seq, dictionary)
    return _forward(letter_lp, word_lp, widths, seg)


def sequence_loglik(seq: Sequence, dictionary: Dictionary) -> float:
    L = forward_table(seq, dictionary)
    if L[-1] == NEG_INF:
        raise ZeroLikelihood("no segmentation of the sequence has positive probability")
    return float(L[-1])


def sample_alignment(seq: Sequence, dictionary: Dictionary, rng_seed=None) -> Alignment:
    """Draw ``A ~ P(A | S, Theta, rho)`` by backward sampling.

    ``rng_seed`` may be an int, a ``SeedSequence`` or a ``numpy.random.Generator``.
    """
    starts, kinds = sample_sites(seq, dictionary, np.random.default_rng(rng_seed))
    return Alignment.from_arrays(starts, kinds)


def sample_sites(seq: Sequence, dictionary: Dictionary, rng: np.random.Generator):
    """Array form of :func:`sample_alignment` used by the sampler's inner loop."""
    letter_lp, word_lp, widths, seg = _tables(seq, dictionary)
    L = _forward(letter_lp, word_lp, widths, seg)
    if L[-1] == NEG_INF:
        raise ZeroLikelihood("no segmentation of the sequence has positive probability")
    uniforms = rng.random(seq.n)
    return _backward_sample(L, letter_lp, word_lp, widths, seg, uniforms)


def complete_data_loglik(counts: CountSummary, dictionary: Dictionary) -> float:
    """``sum_l N_l log rho_l + sum_k sum_ij c_ijk log theta_ijk`` with ``0 log 0 = 0``."""
    if counts.D != dictionary.D or counts.widths != dictionary.widths or counts.d != dictionary.d:
        raise DimensionMismatch("counts do not match the dictionary")
    total = xlogy(counts.word_counts, dictionary.rho).sum()
    for c, pwm in zip(counts.column_counts, dictionary.motifs):
        total += xlogy(c, pwm.theta).sum()
    return float(total)

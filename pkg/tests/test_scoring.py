import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import logsumexp

from conftest import BINARY
from motifmap.errors import CountsTooSmall, DimensionMismatch, InstanceTooLarge, NonPositivePseudoCount
from motifmap.model import Alignment, CountSummary, PriorSpec, Sequence, count_sites
from motifmap.scoring import (count_alignments, enumerate_alignments, exact_bayes_numerator,
                              log_dirichlet_norm, log_joint, log_map, null_log_marginal,
                              stirling_log_map)


def polya_log_joint(seq, align, widths, priors):
    """Sequential predictive (Polya urn) evaluation of log p(S, A | M1)."""
    d = seq.alphabet.d
    x = seq.data
    word_n = np.zeros(priors.D)
    cols = [np.zeros((d, w)) for w in widths]
    sites = dict(align.sites)
    total, pos = 0.0, 0
    while pos < seq.n:
        kind = d + sites[pos] if pos in sites else x[pos]
        total += np.log((word_n[kind] + priors.beta0[kind]) / (word_n.sum() + priors.beta0.sum()))
        word_n[kind] += 1
        if kind < d:
            pos += 1
            continue
        k = kind - d
        for j in range(widths[k]):
            letter = x[pos + j]
            c = cols[k][:, j]
            total += np.log((c[letter] + priors.gamma[letter]) / (c.sum() + priors.gamma.sum()))
            c[letter] += 1
        pos += widths[k]
    return total


def polya_null(seq, alpha):
    n = np.zeros(alpha.size)
    total = 0.0
    for letter in seq.data:
        total += np.log((n[letter] + alpha[letter]) / (n.sum() + alpha.sum()))
        n[letter] += 1
    return total


def test_dirichlet_normaliser_half_parameters():
    # the integral of (xyz)^(-1/2) over the 2-simplex equals 2 pi
    assert log_dirichlet_norm([0.5, 0.5, 0.5]) == pytest.approx(np.log(2 * np.pi), abs=1e-13)


def test_dirichlet_normaliser_by_quadrature():
    v = (1.5, 2.0, 0.7)
    mpmath.mp.dps = 20
    # y = (1 - x) t maps the simplex onto the unit square
    def f(x, t):
        return (x ** (v[0] - 1) * ((1 - x) * t) ** (v[1] - 1)
                * ((1 - x) * (1 - t)) ** (v[2] - 1) * (1 - x))
    val = mpmath.quad(f, [0, 1], [0, 1])
    assert log_dirichlet_norm(v) == pytest.approx(float(mpmath.log(val)), abs=1e-9)


def test_dirichlet_normaliser_rejects_nonpositive():
    with pytest.raises(NonPositivePseudoCount):
        log_dirichlet_norm([1.0, 0.0])


@given(st.lists(st.integers(0, 3), min_size=8, max_size=40), st.integers(0, 10 ** 6),
       st.floats(0.2, 3.0), st.floats(0.1, 2.0))
def test_log_map_matches_polya_urn(letters, seed, letter_pc, gamma_pc):
    rng = np.random.default_rng(seed)
    seq = Sequence(np.array(letters))
    widths = (3,)
    starts, pos = [], int(rng.integers(0, 3))
    while pos + 3 <= seq.n:
        if rng.random() < 0.5:
            starts.append((pos, 0))
            pos += 3
        pos += int(rng.integers(0, 3))
    align = Alignment(tuple(starts))
    priors = PriorSpec(np.concatenate([rng.uniform(0.2, 3, 4) * letter_pc, [rng.uniform(0.2, 2)]]),
                       rng.uniform(0.2, 3, 4), rng.uniform(0.1, 1, 4) * gamma_pc)
    counts = count_sites(seq.data, 4, widths, align.starts, align.kinds)
    expected = polya_log_joint(seq, align, widths, priors) - polya_null(seq, priors.alpha)
    value = log_map(counts, priors)
    assert value.log_map == pytest.approx(expected, abs=1e-9)
    assert value.word_usage + value.background + value.motif_columns == pytest.approx(value.log_map)
    assert log_joint(counts, priors) == pytest.approx(polya_log_joint(seq, align, widths, priors), abs=1e-9)


def test_letters_only_empty_alignment_scores_zero():
    seq = Sequence.from_string("ACGTTGCAAG")
    counts = count_sites(seq.data, 4, (), np.zeros(0, int), np.zeros(0, int))
    assert log_map(counts, PriorSpec.default(n_motifs=0)).log_map == pytest.approx(0.0, abs=1e-12)


def test_mixture_score_is_log_weighted_sum():
    seq = Sequence.from_string("TATAATGGTATAATCC")
    counts = count_sites(seq.data, 4, (6,), np.array([0, 8]), np.array([0, 0]))
    base = PriorSpec.default()
    comps = [(0.3, np.full(4, 0.25)), (0.7, np.array([0.5, 0.1, 0.1, 0.5]))]
    mix = PriorSpec.gamma_mixture(base, comps)
    direct = logsumexp([log_map(counts, base.with_gamma(g)).log_map for _, g in comps], b=[0.3, 0.7])
    value = log_map(counts, mix)
    assert value.log_map == pytest.approx(direct, abs=1e-12)
    assert value.word_usage + value.background + value.motif_columns == pytest.approx(direct)


def test_dimension_mismatch():
    seq = Sequence.from_string("ACGTACGT")
    counts = count_sites(seq.data, 4, (3,), np.array([0]), np.array([0]))
    with pytest.raises(DimensionMismatch):
        log_map(counts, PriorSpec.default(n_motifs=2))


@pytest.mark.parametrize("text, widths", [("ABBA", (2,)), ("ABABAB", (3, 2)), ("AAAAAAA", (3,))])
def test_count_alignments_matches_enumeration(text, widths):
    seq = Sequence.from_string(text, BINARY)
    alignments = list(enumerate_alignments(seq, widths))
    assert len(alignments) == count_alignments(seq, widths)
    assert len(set(alignments)) == len(alignments)
    for a in alignments:
        a.validate(seq, widths)


def test_enumeration_refuses_large_instances():
    seq = Sequence.from_string("ACGT" * 30)
    with pytest.raises(InstanceTooLarge):
        next(enumerate_alignments(seq, (3,), cap=1000))
    with pytest.raises(InstanceTooLarge):
        exact_bayes_numerator(seq, PriorSpec.default(), (3,), cap=1000)


def test_exact_numerator_sums_joint_over_alignments():
    seq = Sequence.from_string("ABBABBAB", BINARY)
    priors = PriorSpec(np.array([1.0, 1.0, 0.5]), np.ones(2), np.full(2, 0.5))
    joints = [log_joint(count_sites(seq.data, 2, (3,), a.starts, a.kinds), priors)
              for a in enumerate_alignments(seq, (3,))]
    assert exact_bayes_numerator(seq, priors, (3,)) == pytest.approx(logsumexp(joints), abs=1e-12)


def test_exact_numerator_without_motifs_is_null_marginal():
    seq = Sequence.from_string("ACGGTCA")
    priors = PriorSpec.default(n_motifs=0)
    assert exact_bayes_numerator(seq, priors, ()) == pytest.approx(
        null_log_marginal(seq.letter_counts(), priors.alpha), abs=1e-12)


def test_stirling_needs_counts_of_two():
    seq = Sequence.from_string("TATAATGCTATAATCA")
    counts = count_sites(seq.data, 4, (6,), np.array([0, 8]), np.array([0, 0]))
    with pytest.raises(CountsTooSmall):
        stirling_log_map(counts, PriorSpec.default())


def test_stirling_error_shrinks_with_counts(rng):
    errors = []
    for m in (10, 100, 1000):
        theta = rng.dirichlet(np.ones(4), size=5).T
        cols = np.stack([rng.multinomial(m, theta[:, j]) for j in range(5)], axis=1) + 2.0
        bg = rng.multinomial(40 * m, np.full(4, 0.25)) + 2.0
        counts = CountSummary(np.concatenate([bg, [cols[:, 0].sum()]]), (cols,), bg)
        pri = PriorSpec.default()
        errors.append(abs(stirling_log_map(counts, pri) - log_map(counts, pri).log_map))
    assert errors[0] > errors[1] > errors[2]

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import logsumexp
from scipy.stats import chisquare

from conftest import BINARY, random_dictionary, segmentations
from motifmap.errors import ZeroLikelihood
from motifmap.likelihood import (complete_data_loglik, forward_table, sample_alignment,
                                 sequence_loglik)
from motifmap.model import DNA, Alignment, Dictionary, Pwm, Sequence, derive_counts


def brute_force_terms(seq, dictionary):
    """Log-probability of every segmentation, computed word by word."""
    x = seq.data
    d = dictionary.d
    terms, keys = [], []
    for seg in segmentations(seq.n, dictionary.widths, seq.segment_starts().tolist()):
        p = 1.0
        for start, kind, w in seg:
            if kind < 0:
                p *= dictionary.rho[x[start]]
            else:
                theta = dictionary.motifs[kind].theta
                p *= dictionary.rho[d + kind]
                for j in range(w):
                    p *= theta[x[start + j], j]
        terms.append(np.log(p) if p > 0 else -np.inf)
        keys.append(tuple((s, k) for s, k, _ in seg if k >= 0))
    return np.array(terms), keys


@given(st.lists(st.integers(0, 1), min_size=1, max_size=10), st.integers(0, 2 ** 32 - 1))
def test_loglik_matches_partition_enumeration(letters, seed):
    rng = np.random.default_rng(seed)
    seq = Sequence(np.array(letters), BINARY)
    dictionary = random_dictionary(rng, 2, (3, 2), BINARY)
    terms, _ = brute_force_terms(seq, dictionary)
    assert sequence_loglik(seq, dictionary) == pytest.approx(logsumexp(terms), abs=1e-10)


def test_forward_table_matches_prefix_enumeration(rng):
    seq = Sequence.from_string("ACGTACGGTA")
    dictionary = random_dictionary(rng, 4, (3,))
    L = forward_table(seq, dictionary)
    assert L[0] == 0.0
    for i in range(1, seq.n + 1):
        terms, _ = brute_force_terms(Sequence(seq.data[:i]), dictionary)
        assert L[i] == pytest.approx(logsumexp(terms), abs=1e-10)


def test_letters_only_loglik_is_multinomial():
    seq = Sequence.from_string("AACGTTTG")
    rho = np.array([0.1, 0.2, 0.3, 0.4])
    expected = float(np.sum(np.log(rho[seq.data])))
    assert sequence_loglik(seq, Dictionary.letters_only(rho=rho)) == pytest.approx(expected, abs=1e-12)


def test_record_boundaries_block_sites():
    motif = Pwm.from_consensus("AA")
    dictionary = Dictionary(DNA, (motif,), np.array([0.2, 0.2, 0.2, 0.2, 0.2]))
    split = Sequence.from_records(["CA", "AC"])
    joined = Sequence.from_string("CAAC")
    assert sequence_loglik(split, dictionary) == pytest.approx(4 * np.log(0.2))
    assert sequence_loglik(joined, dictionary) > sequence_loglik(split, dictionary)


def test_zero_likelihood_raises():
    dictionary = Dictionary(DNA, (Pwm.from_consensus("AC"),), np.array([0, 0.5, 0.5, 0, 0]))
    with pytest.raises(ZeroLikelihood):
        sequence_loglik(Sequence.from_string("ACA"), dictionary)


def test_sampled_alignments_follow_exact_posterior():
    rng = np.random.default_rng(7)
    seq = Sequence(np.array([0, 1, 1, 0, 1, 0, 0, 1]), BINARY)
    dictionary = random_dictionary(rng, 2, (3, 2), BINARY)
    terms, keys = brute_force_terms(seq, dictionary)
    post = np.exp(terms - logsumexp(terms))
    index = {k: i for i, k in enumerate(keys)}
    draws = 20000
    gen = np.random.default_rng(11)
    observed = np.zeros(len(keys))
    for _ in range(draws):
        a = sample_alignment(seq, dictionary, gen)
        observed[index[a.sites]] += 1
    keep = post * draws >= 5
    expected = post[keep] * draws
    obs = observed[keep]
    # fold the rare cells into one bin so the chi-square approximation holds
    expected = np.append(expected, draws - expected.sum())
    obs = np.append(obs, draws - obs.sum())
    assert chisquare(obs, expected).pvalue > 1e-3


def test_sampling_is_deterministic_given_seed(rng):
    seq = Sequence.from_string("ACGTTATAATACGTTATAAT" * 3)
    dictionary = random_dictionary(rng, 4, (6,))
    assert sample_alignment(seq, dictionary, 5) == sample_alignment(seq, dictionary, 5)


def test_sampled_alignment_is_valid(rng):
    seq = Sequence.from_records(["ACGTTATAATACG", "TTATAATGGC", "TATAATT"])
    dictionary = Dictionary(DNA, (Pwm.from_consensus("TATAAT"),), np.array([.1, .1, .1, .1, .6]))
    for seed in range(50):
        a = sample_alignment(seq, dictionary, seed)
        a.validate(seq, (6,))
        assert len(a) == 3


def test_complete_data_loglik_by_hand():
    seq = Sequence.from_string("ACAC")
    motif = Pwm(np.array([[0.7, 0.1], [0.1, 0.6], [0.1, 0.1], [0.1, 0.2]]))
    dictionary = Dictionary(DNA, (motif,), np.array([0.3, 0.3, 0.1, 0.1, 0.2]))
    counts = derive_counts(seq, dictionary, Alignment(((2, 0),)))
    expected = np.log(0.3) * 2 + np.log(0.2) + np.log(0.7) + np.log(0.6)
    assert complete_data_loglik(counts, dictionary) == pytest.approx(expected, abs=1e-12)

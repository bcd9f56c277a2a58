import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from motifmap.errors import (DimensionMismatch, NonPositivePseudoCount, OverlappingSites,
                             SiteCrossesBoundary, SiteOutOfRange, UnknownMotifIndex, ValidationError)
from motifmap.model import (DNA, Alignment, Dictionary, PriorSpec, Pwm, Sequence, consensus,
                            derive_counts)


def shell(widths):
    return Dictionary(DNA, tuple(Pwm(np.full((4, w), 0.25)) for w in widths),
                      np.full(4 + len(widths), 1 / (4 + len(widths))))


def test_alphabet_round_trip():
    text = "ACGTTGCA"
    assert DNA.decode(DNA.encode(text)) == text
    assert DNA.decode(DNA.encode("acgt")) == "ACGT"


def test_alphabet_rejects_unknown_letter():
    with pytest.raises(ValidationError):
        DNA.encode("ACGN")


def test_records_become_segments():
    seq = Sequence.from_records(["ACG", "TT", "GCA"])
    assert seq.boundaries == (0, 3, 5)
    assert seq.records() == ["ACG", "TT", "GCA"]
    assert seq.segment_starts().tolist() == [0, 0, 0, 3, 3, 5, 5, 5]


def test_pwm_validation():
    with pytest.raises(ValidationError):
        Pwm(np.array([[0.5, 0.6], [0.5, 0.5]]))
    with pytest.raises(ValidationError):
        Pwm(np.array([[1.2], [-0.2]]))


def test_consensus_tie_goes_to_lowest_letter():
    theta = np.array([[0.4, 0.1], [0.4, 0.1], [0.1, 0.1], [0.1, 0.7]])
    assert consensus(Pwm(theta)) == "AT"
    assert consensus(Pwm.from_consensus("TATAAT")) == "TATAAT"


def test_dictionary_rho_must_match_words():
    with pytest.raises(DimensionMismatch):
        Dictionary(DNA, (Pwm.from_consensus("AC"),), np.full(4, 0.25))
    with pytest.raises(ValidationError):
        Dictionary(DNA, (), np.array([0.5, 0.5, 0.5, 0.5]))


def test_alignment_sorted_and_indicator_round_trip():
    a = Alignment(((7, 1), (2, 0)))
    assert a.sites == ((2, 0), (7, 1))
    A = a.to_indicator(10, 2)
    assert A.sum() == 2 and A[2, 0] and A[7, 1]
    assert Alignment.from_indicator(A) == a


@pytest.mark.parametrize("sites, widths, exc", [
    (((0, 0), (2, 0)), (3,), OverlappingSites),
    (((8, 0),), (3,), SiteOutOfRange),
    (((0, 2),), (3,), UnknownMotifIndex),
])
def test_alignment_validation(sites, widths, exc):
    seq = Sequence.from_string("ACGTACGTAC")
    with pytest.raises(exc):
        Alignment(sites).validate(seq, widths)


def test_site_may_not_cross_record_boundary():
    seq = Sequence.from_records(["ACGT", "ACGT"])
    with pytest.raises(SiteCrossesBoundary):
        Alignment(((2, 0),)).validate(seq, (3,))
    Alignment(((4, 0),)).validate(seq, (3,))


def test_derive_counts_small_example():
    seq = Sequence.from_string("TATAATGGTATAAT")
    counts = derive_counts(seq, shell((6,)), Alignment(((0, 0), (8, 0))))
    assert counts.word_counts.tolist() == [0, 0, 2, 0, 2]
    assert counts.column_counts[0][:, 0].tolist() == [0, 0, 0, 2]
    assert counts.total_letter_counts.tolist() == seq.letter_counts().tolist()
    assert counts.length == seq.n


@given(st.lists(st.integers(0, 3), min_size=12, max_size=60), st.data())
def test_counts_conserve_letters(letters, data):
    seq = Sequence(np.array(letters))
    widths = (3, 2)
    starts, pos = [], 0
    while pos < seq.n:
        step = data.draw(st.integers(0, 3))
        pos += step
        kind = data.draw(st.integers(0, 1))
        if pos + widths[kind] <= seq.n:
            starts.append((pos, kind))
            pos += widths[kind]
        else:
            break
    counts = derive_counts(seq, shell(widths), Alignment(tuple(starts)))
    letters_in_words = counts.background_counts.sum() + sum(w * counts.word_counts[4 + k]
                                                            for k, w in enumerate(widths))
    assert letters_in_words == seq.n
    np.testing.assert_array_equal(counts.total_letter_counts, seq.letter_counts())
    for k, c in enumerate(counts.column_counts):
        assert np.all(c.sum(axis=0) == counts.word_counts[4 + k])


def test_prior_validation_and_resizing():
    with pytest.raises(NonPositivePseudoCount):
        PriorSpec(np.ones(5), np.ones(4), np.array([0.25, 0.25, 0.0, 0.5]))
    pri = PriorSpec.default(n_motifs=1, motif=2.0)
    bigger = pri.resized(3)
    assert bigger.D == 7 and bigger.beta0[-1] == 2.0
    np.testing.assert_array_equal(bigger.alpha, pri.alpha)


def test_gamma_mixture_weights_must_sum_to_one():
    base = PriorSpec.default()
    with pytest.raises(ValidationError):
        PriorSpec.gamma_mixture(base, [(0.5, np.full(4, 0.25)), (0.4, np.full(4, 0.5))])
    mix = PriorSpec.gamma_mixture(base, [(0.5, np.full(4, 0.25)), (0.5, np.full(4, 0.5))])
    assert len(mix.components) == 2


def test_arrays_are_read_only():
    pwm = Pwm.from_consensus("ACGT")
    with pytest.raises(ValueError):
        pwm.theta[0, 0] = 0.5

import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from motifmap.model import DNA, Alphabet, Dictionary, Pwm, Sequence

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BINARY = Alphabet(("A", "B"))


def all_sequences(alphabet, max_len):
    """Every string over ``alphabet`` of length 1..max_len."""
    for n in range(1, max_len + 1):
        for tup in itertools.product(alphabet.letters, repeat=n):
            yield "".join(tup)


def segmentations(n, widths, seg_starts=None):
    """Independent recursive enumeration of segmentations as lists of (start, kind, width).

    ``kind = -1`` marks a single letter.  Written without the library so it
    can serve as an oracle.
    """
    if seg_starts is None:
        seg_starts = [0] * n
    out = []

    def rec(pos, acc):
        if pos == n:
            out.append(list(acc))
            return
        acc.append((pos, -1, 1))
        rec(pos + 1, acc)
        acc.pop()
        for k, w in enumerate(widths):
            end = pos + w
            if end <= n and seg_starts[pos] == seg_starts[end - 1]:
                acc.append((pos, k, w))
                rec(end, acc)
                acc.pop()

    rec(0, [])
    return out


def random_dictionary(rng, d, widths, alphabet=None):
    alphabet = alphabet or (DNA if d == 4 else Alphabet(tuple("ABCDEFGH"[:d])))
    motifs = tuple(Pwm(rng.dirichlet(np.ones(d), size=w).T) for w in widths)
    rho = rng.dirichlet(np.ones(d + len(widths)))
    return Dictionary(alphabet, motifs, rho)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def toy_sequence():
    return Sequence.from_string("ACGTACGTTATAATGCACGT")

"""Planted-motif sequence generator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasiblePlacement, ValidationError
from .model import DNA, Alignment, Alphabet, Pwm, Sequence, consensus


@dataclass(frozen=True)
class PlantedMotif:
    """One motif type to plant.

    Give exactly one of ``composition`` (letter fractions ``k``), ``pwm`` or
    ``consensus``.  ``proportion`` is sites per letter of sequence; with
    ``exact`` every site is the same consensus word, otherwise site letters
    are drawn column by column from the PWM.
    """

    width: int
    proportion: float
    composition: tuple | None = None
    pwm: Pwm | None = None
    consensus: str | None = None
    exact: bool = True

    def __post_init__(self):
        given = sum(x is not None for x in (self.composition, self.pwm, self.consensus))
        if given != 1:
            raise ValidationError("give exactly one of composition, pwm or consensus")
        if self.pwm is not None and self.pwm.w != self.width:
            raise ValidationError("pwm width differs from width")
        if self.consensus is not None and len(self.consensus) != self.width:
            raise ValidationError("consensus length differs from width")
        if self.proportion < 0:
            raise ValidationError("proportion must be non-negative")


def composition_letter_counts(k, w: int) -> np.ndarray:
    """Integer letter counts summing to ``w`` that realise composition ``k``.

    Floors of ``k_i w`` plus one extra letter for the largest fractional parts
    (ties to the lowest index).
    """
    k = np.asarray(k, dtype=float)
    if np.any(k < 0) or abs(k.sum() - 1.0) > 1e-9:
        raise ValidationError("composition must be a probability vector")
    raw = k * w
    counts = np.floor(raw + 1e-12).astype(int)
    frac = raw - counts
    order = sorted(range(k.size), key=lambda i: (-frac[i], i))
    for i in order[: w - counts.sum()]:
        counts[i] += 1
    return counts


def composition_consensus(k, w: int, rng: np.random.Generator) -> np.ndarray:
    counts = composition_letter_counts(k, w)
    letters = np.repeat(np.arange(counts.size), counts)
    return rng.permutation(letters)


def generate(n: int, theta0, motifs, rng_seed=None, alphabet: Alphabet = DNA):
    """Sequence of ``n`` i.i.d. background letters with planted motif sites.

    Each motif type gets ``round(c n)`` non-overlapping sites at uniform
    starts (rejection sampling, at most ``100 m`` attempts per type).
    Returns ``(Sequence, Alignment)`` with the true sites.
    """
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.shape != (alphabet.d,) or abs(theta0.sum() - 1.0) > 1e-9 or np.any(theta0 < 0):
        raise ValidationError("theta0 must be a probability vector over the alphabet")
    motifs = list(motifs)
    if sum(m.proportion * m.width for m in motifs) >= 1:
        raise ValidationError("planted motifs would cover the whole sequence")
    rng = np.random.default_rng(rng_seed)
    data = rng.choice(alphabet.d, size=n, p=theta0)
    occupied = np.zeros(n + 1, dtype=bool)
    sites = []
    for kind, motif in enumerate(motifs):
        w = motif.width
        m = int(round(motif.proportion * n))
        if motif.composition is not None:
            word = composition_consensus(motif.composition, w, rng)
        elif motif.consensus is not None:
            word = alphabet.encode(motif.consensus)
        else:
            word = alphabet.encode(consensus(motif.pwm, alphabet))
        placed, tries = 0, 0
        while placed < m:
            if tries >= 100 * m or n - w + 1 <= 0:
                raise InfeasiblePlacement(f"could only place {placed} of {m} sites of width {w}")
            tries += 1
            s = int(rng.integers(0, n - w + 1))
            if occupied[s: s + w].any():
                continue
            occupied[s: s + w] = True
            if motif.exact or motif.pwm is None:
                data[s: s + w] = word
            else:
                theta = motif.pwm.theta
                data[s: s + w] = [rng.choice(alphabet.d, p=theta[:, j]) for j in range(w)]
            sites.append((s, kind))
            placed += 1
    return Sequence(data, alphabet), Alignment(tuple(sites))

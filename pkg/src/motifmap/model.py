"""Domain types of the stochastic dictionary model.

A sequence is generated by concatenating words drawn from a dictionary: the
``d`` single letters followed by stochastic words (position weight matrices).
An alignment records where the stochastic words sit; from a sequence and an
alignment we derive the word counts and per-motif column count matrices that
every score in the package is built on.

Conventions used throughout:

* letters are encoded as integer indices ``0..d-1``;
* motif matrices (PWM probabilities and column counts) have shape ``(d, w)``,
  so column ``j`` of a motif is ``matrix[:, j]``;
* motif indices in an ``Alignment`` are 0-based positions in
  ``Dictionary.motifs`` (word ``d + k`` of the dictionary).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence as Seq

import numpy as np

from .errors import (
    DimensionMismatch,
    NonPositivePseudoCount,
    OverlappingSites,
    SiteCrossesBoundary,
    SiteOutOfRange,
    UnknownMotifIndex,
    ValidationError,
)

SIMPLEX_TOL = 1e-9


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Alphabet:
    letters: tuple

    def __post_init__(self):
        letters = tuple(self.letters)
        if len(letters) < 2:
            raise ValidationError("alphabet needs at least two letters")
        if len(set(letters)) != len(letters):
            raise ValidationError("alphabet letters must be distinct")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "_index", {c: i for i, c in enumerate(letters)})

    @property
    def d(self) -> int:
        return len(self.letters)

    def encode(self, text: str) -> np.ndarray:
        index = self._index
        try:
            return np.array([index[c] for c in text.upper()], dtype=np.int64)
        except KeyError as exc:
            raise ValidationError(f"letter {exc.args[0]!r} not in alphabet") from None

    def decode(self, data) -> str:
        return "".join(self.letters[i] for i in data)


DNA = Alphabet(("A", "C", "G", "T"))


@dataclass(frozen=True)
class Sequence:
    """Letter indices plus the starts of hard segments (FASTA records).

    Sites may never straddle a segment boundary.
    """

    data: np.ndarray
    alphabet: Alphabet = DNA
    boundaries: tuple = (0,)

    def __post_init__(self):
        data = _frozen(self.data, np.int64)
        if data.ndim != 1:
            raise ValidationError("sequence data must be one-dimensional")
        if data.size and (data.min() < 0 or data.max() >= self.alphabet.d):
            raise ValidationError("letter index outside alphabet")
        bounds = sorted({int(b) for b in self.boundaries if 0 < int(b) < len(data)} | {0})
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "boundaries", tuple(bounds))

    @classmethod
    def from_string(cls, text: str, alphabet: Alphabet = DNA) -> "Sequence":
        return cls(alphabet.encode(text), alphabet)

    @classmethod
    def from_records(cls, records: Iterable[str], alphabet: Alphabet = DNA) -> "Sequence":
        parts, bounds, pos = [], [], 0
        for rec in records:
            enc = alphabet.encode(rec)
            if not enc.size:
                continue
            bounds.append(pos)
            parts.append(enc)
            pos += enc.size
        data = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
        return cls(data, alphabet, tuple(bounds) or (0,))

    @property
    def n(self) -> int:
        return int(self.data.size)

    def __len__(self):
        return self.n

    def __str__(self):
        return self.alphabet.decode(self.data)

    def segment_starts(self) -> np.ndarray:
        """For every position, the start index of the segment containing it."""
        out = np.zeros(self.n, dtype=np.int64)
        bounds = np.array(self.boundaries, dtype=np.int64)
        out[bounds[bounds < self.n]] = bounds[bounds < self.n]
        return np.maximum.accumulate(out) if self.n else out

    def records(self) -> list:
        ends = list(self.boundaries[1:]) + [self.n]
        return [self.alphabet.decode(self.data[b:e]) for b, e in zip(self.boundaries, ends)]

    def letter_counts(self) -> np.ndarray:
        return np.bincount(self.data, minlength=self.alphabet.d)


@dataclass(frozen=True)
class Pwm:
    """Position weight matrix stored as a ``(d, w)`` array of column probabilities."""

    theta: np.ndarray

    def __post_init__(self):
        theta = _frozen(self.theta)
        if theta.ndim != 2 or theta.shape[1] < 1:
            raise ValidationError("PWM must be a (d, w) matrix with w >= 1")
        if np.any(theta < 0) or np.any(theta > 1):
            raise ValidationError("PWM entries must lie in [0, 1]")
        if np.any(np.abs(theta.sum(axis=0) - 1.0) > SIMPLEX_TOL):
            raise ValidationError("PWM columns must sum to 1")
        object.__setattr__(self, "theta", theta)

    @classmethod
    def from_columns(cls, columns) -> "Pwm":
        return cls(np.asarray(columns, dtype=float).T)

    @classmethod
    def from_consensus(cls, word: str, alphabet: Alphabet = DNA) -> "Pwm":
        idx = alphabet.encode(word)
        theta = np.zeros((alphabet.d, idx.size))
        theta[idx, np.arange(idx.size)] = 1.0
        return cls(theta)

    @property
    def w(self) -> int:
        return self.theta.shape[1]

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    @property
    def columns(self) -> list:
        return [self.theta[:, j] for j in range(self.w)]


def consensus(pwm: Pwm, alphabet: Alphabet = DNA) -> str:
    """Per-column argmax letter; ties go to the lowest letter index."""
    return alphabet.decode(np.argmax(pwm.theta, axis=0))


@dataclass(frozen=True)
class Dictionary:
    """Single letters plus stochastic words, with word usage probabilities ``rho``.

    ``rho`` has length ``D = d + len(motifs)``: letters first, then motifs.
    """

    alphabet: Alphabet
    motifs: tuple
    rho: np.ndarray

    def __post_init__(self):
        motifs = tuple(self.motifs)
        rho = _frozen(self.rho)
        d = self.alphabet.d
        for m in motifs:
            if m.d != d:
                raise DimensionMismatch("PWM row count must equal alphabet size")
        if rho.shape != (d + len(motifs),):
            raise DimensionMismatch(f"rho must have length D={d + len(motifs)}")
        if np.any(rho < 0) or abs(rho.sum() - 1.0) > SIMPLEX_TOL:
            raise ValidationError("rho must be a probability vector")
        object.__setattr__(self, "motifs", motifs)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def letters_only(cls, alphabet: Alphabet = DNA, rho=None) -> "Dictionary":
        d = alphabet.d
        rho = np.full(d, 1.0 / d) if rho is None else rho
        return cls(alphabet, (), rho)

    @property
    def d(self) -> int:
        return self.alphabet.d

    @property
    def D(self) -> int:
        return self.d + len(self.motifs)

    @property
    def widths(self) -> tuple:
        return tuple(m.w for m in self.motifs)


@dataclass(frozen=True)
class Alignment:
    """Typed, non-overlapping motif sites as ``(start, motif_index)`` pairs."""

    sites: tuple = ()

    def __post_init__(self):
        sites = tuple(sorted((int(s), int(k)) for s, k in self.sites))
        object.__setattr__(self, "sites", sites)

    @classmethod
    def empty(cls) -> "Alignment":
        return cls(())

    @classmethod
    def from_arrays(cls, starts, kinds) -> "Alignment":
        return cls(tuple(zip(np.asarray(starts).tolist(), np.asarray(kinds).tolist())))

    def __len__(self):
        return len(self.sites)

    def __iter__(self):
        return iter(self.sites)

    @property
    def starts(self) -> np.ndarray:
        return np.array([s for s, _ in self.sites], dtype=np.int64)

    @property
    def kinds(self) -> np.ndarray:
        return np.array([k for _, k in self.sites], dtype=np.int64)

    def of_kind(self, k: int) -> np.ndarray:
        return np.array([s for s, kk in self.sites if kk == k], dtype=np.int64)

    def to_indicator(self, n: int, n_motifs: int) -> np.ndarray:
        """Site-start indicator array ``A`` of shape ``(n, n_motifs)``."""
        A = np.zeros((n, n_motifs), dtype=bool)
        for s, k in self.sites:
            A[s, k] = True
        return A

    @classmethod
    def from_indicator(cls, A) -> "Alignment":
        starts, kinds = np.nonzero(np.asarray(A))
        return cls.from_arrays(starts, kinds)

    def validate(self, seq: Sequence, widths: Seq[int]) -> None:
        seg = seq.segment_starts()
        last_end = -1
        for s, k in self.sites:
            if not 0 <= k < len(widths):
                raise UnknownMotifIndex(f"motif index {k} not in dictionary")
            end = s + widths[k]
            if s < 0 or end > seq.n:
                raise SiteOutOfRange(f"site [{s}, {end}) outside sequence of length {seq.n}")
            if seg[s] != seg[end - 1]:
                raise SiteCrossesBoundary(f"site [{s}, {end}) crosses a record boundary")
            if s < last_end:
                raise OverlappingSites(f"site at {s} overlaps the previous site")
            last_end = end


@dataclass(frozen=True)
class CountSummary:
    """Word counts ``N``, motif column counts ``C_k`` and background letter counts.

    ``background_counts`` are the letters outside every site (the letter part
    of ``N``); ``total_letter_counts`` are the raw letter tallies of the
    sequence, i.e. the counts seen by the null model.
    """

    word_counts: np.ndarray
    column_counts: tuple
    background_counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "word_counts", _frozen(self.word_counts))
        object.__setattr__(self, "column_counts", tuple(_frozen(c) for c in self.column_counts))
        object.__setattr__(self, "background_counts", _frozen(self.background_counts))
        d = self.background_counts.size
        if self.word_counts.size != d + len(self.column_counts):
            raise DimensionMismatch("word_counts length must be d + number of motifs")
        for c in self.column_counts:
            if c.ndim != 2 or c.shape[0] != d:
                raise DimensionMismatch("column counts must be (d, w) matrices")

    @property
    def d(self) -> int:
        return self.background_counts.size

    @property
    def D(self) -> int:
        return self.word_counts.size

    @property
    def n_motifs(self) -> int:
        return len(self.column_counts)

    @property
    def widths(self) -> tuple:
        return tuple(c.shape[1] for c in self.column_counts)

    @property
    def motif_letter_counts(self) -> np.ndarray:
        out = np.zeros(self.d)
        for c in self.column_counts:
            out += c.sum(axis=1)
        return out

    @property
    def total_letter_counts(self) -> np.ndarray:
        return self.background_counts + self.motif_letter_counts

    @property
    def length(self) -> int:
        return int(round(self.total_letter_counts.sum()))


def count_sites(data: np.ndarray, d: int, widths: Seq[int], starts: np.ndarray,
                kinds: np.ndarray) -> CountSummary:
    """Counting kernel without validation; ``derive_counts`` is the checked entry point."""
    total = np.bincount(data, minlength=d).astype(float)
    cols = []
    n_sites = np.zeros(len(widths))
    for k, w in enumerate(widths):
        s = starts[kinds == k]
        n_sites[k] = s.size
        if s.size:
            letters = data[s[:, None] + np.arange(w)]
            idx = letters * w + np.arange(w)
            cols.append(np.bincount(idx.ravel(), minlength=d * w).reshape(d, w).astype(float))
        else:
            cols.append(np.zeros((d, w)))
    motif_letters = sum((c.sum(axis=1) for c in cols), np.zeros(d))
    bg = total - motif_letters
    return CountSummary(np.concatenate([bg, n_sites]), tuple(cols), bg)


def derive_counts(seq: Sequence, dictionary: Dictionary, align: Alignment) -> CountSummary:
    if seq.alphabet.d != dictionary.d:
        raise DimensionMismatch("sequence and dictionary alphabets differ")
    align.validate(seq, dictionary.widths)
    return count_sites(seq.data, seq.alphabet.d, dictionary.widths, align.starts, align.kinds)


@dataclass(frozen=True)
class PriorSpec:
    """Dirichlet pseudo-counts for the motif model and the null model.

    ``beta0`` (length D) governs word usage under the motif model, ``alpha``
    (length d) the letter usage under the null model, and ``gamma`` (length d)
    the product-Dirichlet prior shared by every motif column.  ``mixture``
    optionally lists ``(weight, PriorSpec)`` components; a mixture is scored as
    the weighted sum of component marginals.
    """

    beta0: np.ndarray
    alpha: np.ndarray
    gamma: np.ndarray
    mixture: tuple = field(default=())

    def __post_init__(self):
        beta0, alpha, gamma = _frozen(self.beta0), _frozen(self.alpha), _frozen(self.gamma)
        for name, v in (("beta0", beta0), ("alpha", alpha), ("gamma", gamma)):
            if v.ndim != 1 or not np.all(v > 0) or not np.all(np.isfinite(v)):
                raise NonPositivePseudoCount(f"{name} pseudo-counts must be positive")
        if alpha.size != gamma.size or beta0.size < alpha.size:
            raise DimensionMismatch("alpha and gamma need length d; beta0 needs length D >= d")
        mixture = tuple((float(wt), comp) for wt, comp in self.mixture)
        if mixture:
            weights = np.array([wt for wt, _ in mixture])
            if np.any(weights <= 0) or abs(weights.sum() - 1.0) > SIMPLEX_TOL:
                raise ValidationError("mixture weights must be positive and sum to 1")
            for _, comp in mixture:
                if comp.mixture:
                    raise ValidationError("nested mixtures are not supported")
                if comp.beta0.size != beta0.size or comp.gamma.size != gamma.size:
                    raise DimensionMismatch("mixture components must match dimensions")
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "mixture", mixture)

    @classmethod
    def default(cls, d: int = 4, n_motifs: int = 1, letter: float = 1.0,
                motif: float = 1.0, gamma_total: float = 1.0) -> "PriorSpec":
        """Symmetric priors; ``alpha`` equals the letter part of ``beta0``."""
        beta0 = np.concatenate([np.full(d, letter), np.full(n_motifs, motif)])
        return cls(beta0, np.full(d, letter), np.full(d, gamma_total / d))

    @property
    def d(self) -> int:
        return self.alpha.size

    @property
    def D(self) -> int:
        return self.beta0.size

    @property
    def n_motifs(self) -> int:
        return self.D - self.d

    @property
    def components(self) -> tuple:
        """``(weight, PriorSpec)`` pairs; a plain prior is its own single component."""
        if self.mixture:
            return self.mixture
        return ((1.0, self),)

    def resized(self, n_motifs: int) -> "PriorSpec":
        """Same priors for a dictionary with ``n_motifs`` motifs.

        New motif words reuse the last motif pseudo-count (1.0 if there is none).
        """
        d = self.d
        motif_pc = self.beta0[-1] if self.D > d else 1.0
        beta0 = np.concatenate([self.beta0[:d], np.full(n_motifs, motif_pc)])
        mixture = tuple((wt, comp.resized(n_motifs)) for wt, comp in self.mixture)
        return PriorSpec(beta0, self.alpha, self.gamma, mixture)

    def with_gamma(self, gamma) -> "PriorSpec":
        return PriorSpec(self.beta0, self.alpha, gamma)

    @classmethod
    def gamma_mixture(cls, base: "PriorSpec", components) -> "PriorSpec":
        """Mixture over the motif-column prior only: ``components`` is ``[(weight, gamma), ...]``."""
        comps = tuple((wt, base.with_gamma(g)) for wt, g in components)
        return cls(base.beta0, base.alpha, base.gamma, comps)

"""Data-augmentation sampling of alignments and progressive motif discovery.

Each iteration draws ``A ~ P(A | S, Theta, rho)`` through the forward table,
then ``Theta_k ~ PD(gamma + C_k)`` and ``rho ~ Dirichlet(N + beta0)`` from the
conjugate posteriors.  The logMAP of every sampled alignment is recorded and
the best alignment seen is kept.  Chains run in a thread pool (the dynamic
programme releases the GIL), each with its own RNG spawned from one seed.
"""
from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import TooFewIterations, ValidationError
from .likelihood import sample_sites
from .model import Alignment, CountSummary, Dictionary, PriorSpec, Pwm, Sequence, count_sites
from .scoring import log_joint, log_map

THREADS_ENV = "MOTIFMAP_THREADS"
# weight of the background in a seeded motif column; keeps the seed word
# dominant while letting the sampler move away from it
SEED_BLEND = 0.3


def worker_count(jobs: int) -> int:
    """Thread count for ``jobs`` independent tasks, capped by ``MOTIFMAP_THREADS``."""
    cap = os.environ.get(THREADS_ENV)
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer") from None
    return max(1, min(jobs, limit))


@dataclass(frozen=True)
class DaConfig:
    """Sampler settings.  ``widths`` are the candidate widths for a new motif."""

    widths: tuple = (8,)
    iterations: int = 5000
    burn_in: int = 1000
    chains: int = 5
    seed: object = None
    priors: PriorSpec | None = None

    def __post_init__(self):
        widths = tuple(int(w) for w in self.widths)
        if not widths or min(widths) < 1:
            raise ValidationError("widths must be a non-empty list of positive integers")
        object.__setattr__(self, "widths", widths)
        if self.burn_in < 0:
            raise ValidationError("burn-in must be non-negative")
        if self.iterations <= self.burn_in:
            raise TooFewIterations("iterations must exceed burn-in")
        if self.chains < 1:
            raise ValidationError("need at least one chain")

    def priors_for(self, d: int, n_motifs: int) -> PriorSpec:
        if self.priors is None:
            return PriorSpec.default(d=d, n_motifs=n_motifs)
        if self.priors.d != d:
            raise ValidationError("priors do not match the alphabet size")
        return self.priors.resized(n_motifs)


@dataclass(frozen=True)
class DaTrace:
    """Outcome of :func:`run_da`.

    ``log_maps`` is the post-burn-in trace of the chain that found the best
    alignment; ``chain_log_maps`` holds every chain's trace.  The best
    nonempty alignment is tracked separately for comparisons against the
    empty alignment.
    """

    log_maps: np.ndarray
    chain_log_maps: np.ndarray
    best_alignment: Alignment
    best_log_map: float
    best_chain: int
    widths: tuple
    best_nonempty_log_map: float = -np.inf
    best_nonempty_alignment: Alignment | None = None
    burn_in: int = 0

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "log_map"])
        for i, v in enumerate(self.log_maps):
            writer.writerow([i + self.burn_in, f"{v:.12g}"])

    def best_alignment_json(self) -> str:
        return json.dumps({"widths": list(self.widths), "log_map": float(self.best_log_map),
                           "sites": [[int(s), int(k)] for s, k in self.best_alignment]})


def _draw_parameters(counts: CountSummary, priors: PriorSpec, seq: Sequence, rng) -> Dictionary:
    comps = priors.components
    if len(comps) > 1:
        logs = np.array([np.log(wt) + log_joint(counts, comp) for wt, comp in comps])
        p = np.exp(logs - logs.max())
        comp = comps[rng.choice(len(comps), p=p / p.sum())][1]
    else:
        comp = comps[0][1]
    rho = rng.dirichlet(counts.word_counts + comp.beta0)
    motifs = tuple(Pwm(_dirichlet_columns(c + comp.gamma[:, None], rng)) for c in counts.column_counts)
    return Dictionary(seq.alphabet, motifs, rho)


def _dirichlet_columns(params, rng):
    g = rng.standard_gamma(params)
    tot = g.sum(axis=0)
    # all-zero columns can only arise from underflow at tiny pseudo-counts
    bad = tot <= 0
    if np.any(bad):
        g[:, bad] = 0.0
        g[rng.choice(params.shape[0], size=bad.sum()), np.flatnonzero(bad)] = 1.0
        tot = g.sum(axis=0)
    return g / tot


def _run_chain(seq, init: Dictionary, cfg: DaConfig, priors: PriorSpec, seed_seq):
    rng = np.random.default_rng(seed_seq)
    widths = init.widths
    d = seq.alphabet.d
    dictionary = init
    trace = np.empty(cfg.iterations - cfg.burn_in)
    best = (-np.inf, None)
    best_nonempty = (-np.inf, None)
    for it in range(cfg.iterations):
        starts, kinds = sample_sites(seq, dictionary, rng)
        counts = count_sites(seq.data, d, widths, starts, kinds)
        score = log_map(counts, priors).log_map
        if it >= cfg.burn_in:
            trace[it - cfg.burn_in] = score
            if score > best[0]:
                best = (score, (starts, kinds))
            if starts.size and score > best_nonempty[0]:
                best_nonempty = (score, (starts, kinds))
        dictionary = _draw_parameters(counts, priors, seq, rng)
    return trace, best, best_nonempty


def run_da(seq: Sequence, init_dict, cfg: DaConfig) -> DaTrace:
    """Run ``cfg.chains`` data-augmentation chains and merge them.

    ``init_dict`` is one starting :class:`Dictionary` shared by all chains or
    a list with one per chain.  The global best logMAP wins; ties go to the
    lowest chain index.  Output is deterministic given ``cfg.seed``.
    """
    inits = list(init_dict) if isinstance(init_dict, (list, tuple)) else [init_dict] * cfg.chains
    if len(inits) != cfg.chains:
        raise ValidationError("need one initial dictionary per chain")
    widths = inits[0].widths
    if any(d.widths != widths for d in inits):
        raise ValidationError("initial dictionaries must share motif widths")
    priors = cfg.priors_for(seq.alphabet.d, len(widths))
    seeds = (cfg.seed if isinstance(cfg.seed, np.random.SeedSequence)
             else np.random.SeedSequence(cfg.seed)).spawn(cfg.chains)
    jobs = list(zip(inits, seeds))
    workers = worker_count(len(jobs))
    if workers == 1:
        results = [_run_chain(seq, init, cfg, priors, s) for init, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _run_chain(seq, job[0], cfg, priors, job[1]), jobs))
    best_chain = int(np.argmax([r[1][0] for r in results]))  # argmax keeps the first maximum
    trace, (score, (starts, kinds)), _ = results[best_chain]
    ne_chain = int(np.argmax([r[2][0] for r in results]))
    ne_score, ne_sites = results[ne_chain][2]
    return DaTrace(
        log_maps=trace,
        chain_log_maps=np.array([r[0] for r in results]),
        best_alignment=Alignment.from_arrays(starts, kinds),
        best_log_map=float(score),
        best_chain=best_chain,
        widths=widths,
        best_nonempty_log_map=float(ne_score),
        best_nonempty_alignment=None if ne_sites is None else Alignment.from_arrays(*ne_sites),
        burn_in=cfg.burn_in,
    )


def frequent_words(seq: Sequence, w: int, blocked=None) -> list:
    """Distinct ``w``-mers ordered by occurrence count (ties by code), as ``(word, count)``.

    Windows crossing a record boundary or touching a ``blocked`` position are skipped.
    """
    n, d = seq.n, seq.alphabet.d
    if n < w:
        return []
    data = seq.data.astype(np.int64)
    code = np.zeros(n - w + 1, dtype=np.int64)
    for j in range(w):
        code = code * d + data[j: n - w + 1 + j]
    seg = seq.segment_starts()
    ok = seg[:n - w + 1] == seg[w - 1:]
    if blocked is not None:
        cover = np.concatenate([[0], np.cumsum(blocked.astype(np.int64))])
        ok &= (cover[w:] - cover[:-w]) == 0
    words, counts = np.unique(code[ok], return_counts=True)
    order = np.lexsort((words, -counts))
    out = []
    for i in order:
        letters = np.empty(w, dtype=np.int64)
        c = words[i]
        for j in range(w - 1, -1, -1):
            letters[j] = c % d
            c //= d
        out.append((letters, int(counts[i])))
    return out


def _site_mask(n: int, align: Alignment, widths) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    for s, k in align:
        mask[s: s + widths[k]] = True
    return mask


def fitted_dictionary(seq: Sequence, widths, align: Alignment, priors: PriorSpec) -> Dictionary:
    """Posterior-mean dictionary given an alignment (first mixture component for mixtures)."""
    counts = count_sites(seq.data, seq.alphabet.d, tuple(widths), align.starts, align.kinds)
    comp = priors.components[0][1] if priors.mixture else priors
    rho = counts.word_counts + comp.beta0
    motifs = tuple(Pwm((c + comp.gamma[:, None]) / (c + comp.gamma[:, None]).sum(axis=0))
                   for c in counts.column_counts)
    return Dictionary(seq.alphabet, motifs, rho / rho.sum())


def seeded_dictionaries(seq: Sequence, w: int, chains: int, base: Dictionary | None = None,
                        base_align: Alignment | None = None) -> list:
    """One starting dictionary per chain, each adding a width-``w`` motif to ``base``.

    Chain ``c`` seeds its new motif with the ``c``-th most frequent ``w``-mer
    that avoids the sites of ``base_align``: each column puts ``1 - SEED_BLEND``
    on the seed letter and spreads the rest by background frequency.
    """
    d = seq.alphabet.d
    base = base if base is not None else Dictionary.letters_only(seq.alphabet)
    base_align = base_align if base_align is not None else Alignment.empty()
    blocked = _site_mask(seq.n, base_align, base.widths)
    bg = np.bincount(seq.data[~blocked], minlength=d) + 1.0
    bg = bg / bg.sum()
    words = frequent_words(seq, w, blocked)
    if not words:
        raise ValidationError(f"sequence too short for width {w}")
    out = []
    for c in range(chains):
        word, count = words[min(c, len(words) - 1)]
        theta = SEED_BLEND * np.repeat(bg[:, None], w, axis=1)
        theta[word, np.arange(w)] += 1.0 - SEED_BLEND
        new_rho = max(count, 1) / seq.n
        rho = np.concatenate([base.rho * (1.0 - new_rho), [new_rho]])
        out.append(Dictionary(seq.alphabet, base.motifs + (Pwm(theta),), rho / rho.sum()))
    return out


@dataclass(frozen=True)
class Discovery:
    """Result of :func:`progressive_discover`.

    ``log_maps[i]`` is the logMAP with ``i + 1`` accepted motifs and
    ``deltas[i]`` its increase over the previous dictionary.
    """

    dictionary: Dictionary
    alignment: Alignment
    deltas: list = field(default_factory=list)
    log_maps: list = field(default_factory=list)
    rejected_delta: float | None = None

    @property
    def n_motifs(self) -> int:
        return len(self.dictionary.motifs)


def progressive_discover(seq: Sequence, cfg: DaConfig, max_motifs: int) -> Discovery:
    """Add motifs one at a time while logMAP keeps rising and stays positive.

    For each candidate width the sampler is rerun with one extra motif,
    seeded from frequent words outside the current sites; the width with the
    highest logMAP is the candidate.  It is accepted iff its logMAP exceeds
    the current one and is positive.  The letters-only dictionary scores 0.
    """
    if max_motifs < 1:
        raise ValidationError("max_motifs must be at least 1")
    root = cfg.seed if isinstance(cfg.seed, np.random.SeedSequence) else np.random.SeedSequence(cfg.seed)
    dictionary = Dictionary.letters_only(seq.alphabet)
    align = Alignment.empty()
    current = 0.0
    deltas, scores = [], []
    rejected = None
    for step in range(max_motifs):
        best = None
        for w, child in zip(cfg.widths, root.spawn(len(cfg.widths))):
            inits = seeded_dictionaries(seq, w, cfg.chains, dictionary, align)
            trace = run_da(seq, inits, replace(cfg, seed=child))
            if best is None or trace.best_log_map > best.best_log_map:
                best = trace
        delta = best.best_log_map - current
        if not (delta > 0 and best.best_log_map > 0):
            rejected = delta
            break
        align = best.best_alignment
        priors = cfg.priors_for(seq.alphabet.d, len(best.widths))
        dictionary = fitted_dictionary(seq, best.widths, align, priors)
        current = best.best_log_map
        deltas.append(delta)
        scores.append(current)
    return Discovery(dictionary, align, deltas, scores, rejected)

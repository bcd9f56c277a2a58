"""FASTA and JSON serialisation of sequences, dictionaries, alignments and priors."""
from __future__ import annotations

import json

import numpy as np

from .errors import ValidationError
from .model import DNA, Alignment, Alphabet, Dictionary, PriorSpec, Pwm, Sequence


def parse_fasta(text: str, alphabet: Alphabet = DNA) -> tuple:
    """Parse FASTA text into ``(Sequence, names)``; records become segments.

    Text without any header line is read as a single unnamed record.
    """
    names, chunks = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            names.append(line[1:].strip())
            chunks.append([])
        else:
            if not chunks:
                names.append("")
                chunks.append([])
            chunks[-1].append(line)
    records = ["".join(c) for c in chunks]
    records = [r for r in records if r]
    if not records:
        raise ValidationError("FASTA input contains no sequence")
    return Sequence.from_records(records, alphabet), names


def read_fasta(path, alphabet: Alphabet = DNA) -> tuple:
    with open(path) as fh:
        return parse_fasta(fh.read(), alphabet)


def format_fasta(seq: Sequence, names=None, line_width: int = 60) -> str:
    records = seq.records()
    names = list(names) if names else [f"seq{i + 1}" for i in range(len(records))]
    out = []
    for name, rec in zip(names, records):
        out.append(f">{name}")
        out.extend(rec[i: i + line_width] for i in range(0, len(rec), line_width))
    return "\n".join(out) + "\n"


def _load(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None


def _field(obj, key):
    if not isinstance(obj, dict) or key not in obj:
        raise ValidationError(f"JSON object is missing {key!r}")
    return obj[key]


def alignment_to_dict(align: Alignment, widths) -> dict:
    return {"widths": [int(w) for w in widths], "sites": [[int(s), int(k)] for s, k in align]}


def alignment_from_dict(obj) -> tuple:
    """``(Alignment, widths)`` from ``{"widths": [...], "sites": [[start, kind], ...]}``."""
    widths = tuple(int(w) for w in _field(obj, "widths"))
    try:
        sites = tuple((int(s), int(k)) for s, k in obj.get("sites", []))
    except (TypeError, ValueError):
        raise ValidationError("sites must be [start, kind] pairs") from None
    return Alignment(sites), widths


def load_alignment(path) -> tuple:
    with open(path) as fh:
        return alignment_from_dict(_load(fh.read()))


def dictionary_to_dict(dictionary: Dictionary) -> dict:
    return {"alphabet": "".join(dictionary.alphabet.letters),
            "rho": dictionary.rho.tolist(),
            "motifs": [m.theta.tolist() for m in dictionary.motifs]}


def dictionary_from_dict(obj) -> Dictionary:
    alphabet = Alphabet(tuple(obj.get("alphabet", "ACGT")))
    motifs = tuple(Pwm(np.asarray(m, dtype=float)) for m in obj.get("motifs", []))
    return Dictionary(alphabet, motifs, np.asarray(_field(obj, "rho"), dtype=float))


def priors_to_dict(priors: PriorSpec) -> dict:
    out = {"beta0": priors.beta0.tolist(), "alpha": priors.alpha.tolist(), "gamma": priors.gamma.tolist()}
    if priors.mixture:
        out["mixture"] = [{"weight": wt, **priors_to_dict(comp)} for wt, comp in priors.mixture]
    return out


def priors_from_dict(obj, d: int = 4, n_motifs: int = 1) -> PriorSpec:
    """Priors from JSON.

    Either explicit ``beta0``/``alpha``/``gamma`` vectors (plus an optional
    ``mixture`` list of weighted components), or the shorthand
    ``{"letter": 1, "motif": 1, "gamma_total": 1}``.  A ``gamma_mixture`` list
    of ``[weight, gamma]`` pairs mixes the column prior only.
    """
    if not isinstance(obj, dict):
        raise ValidationError("priors JSON must be an object")
    try:
        if "beta0" in obj:
            mixture = tuple((float(c["weight"]), priors_from_dict(c, d, n_motifs))
                            for c in obj.get("mixture", []))
            base = PriorSpec(np.asarray(obj["beta0"], float), np.asarray(_field(obj, "alpha"), float),
                             np.asarray(_field(obj, "gamma"), float), mixture)
        else:
            base = PriorSpec.default(d=d, n_motifs=n_motifs, letter=float(obj.get("letter", 1.0)),
                                     motif=float(obj.get("motif", 1.0)),
                                     gamma_total=float(obj.get("gamma_total", 1.0)))
        if "gamma_mixture" in obj:
            base = PriorSpec.gamma_mixture(base, [(float(wt), np.asarray(g, float))
                                                  for wt, g in obj["gamma_mixture"]])
    except (TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"invalid priors JSON: {exc}") from None
    return base


def load_priors(path, d: int = 4, n_motifs: int = 1) -> PriorSpec:
    with open(path) as fh:
        return priors_from_dict(_load(fh.read()), d, n_motifs)

"""Command-line interface: ``motifmap <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 instance too large for exhaustive
enumeration, 4 numeric domain violation.
"""
from __future__ import annotations

import argparse
import csv
import io as _stringio
import json
import os
import sys

import numpy as np

from . import asymptotics, criteria, io, sampler, scoring, sensitivity, simulate
from .errors import DomainViolation, InstanceTooLarge, ValidationError
from .model import DNA, Alignment, PriorSpec, Pwm, consensus, derive_counts, Dictionary

EXIT_OK, EXIT_VALIDATION, EXIT_TOO_LARGE, EXIT_DOMAIN = 0, 2, 3, 4


def fmt(x) -> str:
    return f"{float(x):.12g}"


def parse_floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def parse_ints(text: str) -> list:
    """Comma-separated integers and inclusive ``a-b`` or ``a:b`` ranges."""
    out = []
    for tok in (t.strip() for t in text.split(",")):
        if not tok:
            continue
        sep = ":" if ":" in tok else ("-" if "-" in tok[1:] else None)
        try:
            if sep:
                a, b = tok.split(sep, 1)
                out.extend(range(int(a), int(b) + 1))
            else:
                out.append(int(tok))
        except ValueError:
            raise ValidationError(f"bad integer list {text!r}") from None
    return out


def parse_c_range(text: str) -> list:
    """Either a comma list or ``start:stop:count`` (inclusive, evenly spaced)."""
    if text.count(":") == 2:
        a, b, n = text.split(":")
        try:
            return list(np.linspace(float(a), float(b), int(n)))
        except ValueError:
            raise ValidationError(f"bad range {text!r}") from None
    return parse_floats(text)


def _priors(path, n_motifs: int) -> PriorSpec:
    if path is None:
        return PriorSpec.default(d=DNA.d, n_motifs=n_motifs)
    return io.load_priors(path, DNA.d, n_motifs)


def _parse_motif(text: str, exact: bool) -> simulate.PlantedMotif:
    parts = text.split(":", 2)
    if len(parts) != 3:
        raise ValidationError(f"--motif must be w:c:k, got {text!r}")
    try:
        w, c = int(parts[0]), float(parts[1])
    except ValueError:
        raise ValidationError(f"bad width or proportion in {text!r}") from None
    body = parts[2]
    if os.path.exists(body):
        with open(body) as fh:
            text = fh.read()
        try:
            theta = np.asarray(json.loads(text), dtype=float)
        except json.JSONDecodeError:
            theta = np.loadtxt(_stringio.StringIO(text), delimiter=",", ndmin=2)
        return simulate.PlantedMotif(w, c, pwm=Pwm(theta), exact=exact)
    if body.isalpha():
        return simulate.PlantedMotif(w, c, consensus=body.upper(), exact=exact)
    return simulate.PlantedMotif(w, c, composition=tuple(parse_floats(body)), exact=exact)


def cmd_simulate(args, out):
    theta0 = parse_floats(args.theta0) if args.theta0 else [0.25] * 4
    motifs = [_parse_motif(m, args.exact) for m in args.motif]
    seq, truth = simulate.generate(args.n, theta0, motifs, args.seed)
    fasta = io.format_fasta(seq, ["simulated"])
    widths = [m.width for m in motifs]
    if args.out:
        with open(args.out + ".fa", "w") as fh:
            fh.write(fasta)
        with open(args.out + ".truth.json", "w") as fh:
            json.dump(io.alignment_to_dict(truth, widths), fh)
    else:
        out.write(fasta)


def cmd_score(args, out):
    seq, _ = io.read_fasta(args.fasta)
    if args.alignment:
        align, widths = io.load_alignment(args.alignment)
    else:
        align, widths = Alignment.empty(), ()
    if args.null_align:
        align = Alignment.empty()
    priors = _priors(args.priors, len(widths))
    shell = Dictionary(DNA, tuple(Pwm(np.full((DNA.d, w), 0.25)) for w in widths),
                       np.full(DNA.d + len(widths), 1.0 / (DNA.d + len(widths))))
    counts = derive_counts(seq, shell, align)
    value = scoring.log_map(counts, priors)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["quantity", "value"])
    for name in ("log_map", "word_usage", "background", "motif_columns"):
        writer.writerow([name, fmt(getattr(value, name))])
    for row in criteria.compare_criteria(seq, widths, align, priors):
        if row.criterion != "logMAP":
            writer.writerow([f"{row.criterion}_{row.model}", fmt(row.score)])


def cmd_discover(args, out):
    seq, _ = io.read_fasta(args.fasta)
    if args.max_motifs < 1:
        raise ValidationError("--max-motifs must be at least 1")
    priors = io.load_priors(args.priors, DNA.d, 0) if args.priors else None
    cfg = sampler.DaConfig(widths=tuple(parse_ints(args.widths)), iterations=args.iters,
                           burn_in=args.burnin, chains=args.chains, seed=args.seed, priors=priors)
    result = sampler.progressive_discover(seq, cfg, args.max_motifs)
    motifs = []
    for k, pwm in enumerate(result.dictionary.motifs):
        motifs.append({"consensus": consensus(pwm), "width": pwm.w, "pwm": pwm.theta.tolist(),
                       "sites": result.alignment.of_kind(k).tolist(),
                       "delta_log_map": float(fmt(result.deltas[k])),
                       "log_map": float(fmt(result.log_maps[k]))})
    doc = {"accepted": len(motifs), "motifs": motifs,
           "rejected_delta": None if result.rejected_delta is None else float(fmt(result.rejected_delta))}
    json.dump(doc, out, indent=2)
    out.write("\n")


def cmd_divergence(args, out):
    cs = parse_c_range(args.c_range)
    ws = parse_ints(args.w_range)
    theta0 = parse_floats(args.theta0) if args.theta0 else None
    k = parse_floats(args.k) if args.k else None
    rows = asymptotics.df_grid(cs, ws, args.profile, args.d, theta0, k, include_max=args.max)
    if args.out:
        with open(args.out, "w") as fh:
            asymptotics.write_grid_csv(rows, fh, args.max)
    else:
        asymptotics.write_grid_csv(rows, out, args.max)


def _read_counts(path) -> np.ndarray:
    with open(path) as fh:
        rows = [r for r in csv.reader(fh) if r and any(x.strip() for x in r)]
    try:
        values = [[float(x) for x in r] for r in rows]
    except ValueError:
        values = [[float(x) for x in r] for r in rows[1:]]
    try:
        C = np.asarray(values, dtype=float)
    except ValueError:
        raise ValidationError("counts CSV rows must all have the same length") from None
    if C.ndim != 2 or C.shape[0] != DNA.d or np.any(C < 0):
        raise ValidationError("counts CSV must have 4 rows (A, C, G, T) of non-negative counts")
    return C


def cmd_sensitivity(args, out):
    C = _read_counts(args.counts)
    eps = parse_floats(args.epsilon)
    if not eps or any(not 0 < e < 1 for e in eps):
        raise ValidationError("--epsilon values must lie in (0, 1)")
    if args.grid_points < 1:
        raise ValidationError("--grid-points must be positive")
    grid = sensitivity.DeltaGrid.uniform(args.grid_points)
    kinds = [k.strip() for k in args.prior_kind.split(",") if k.strip()]
    composition = parse_floats(args.composition) if args.composition else C.sum(axis=1)
    summary = []
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for kind in kinds:
        if args.gamma and kind == "equal":
            base = [(1.0, np.asarray(parse_floats(args.gamma)))]
        else:
            base = sensitivity.column_prior(kind, args.gamma_total, composition)
        for e in eps:
            rep = sensitivity.delta_grid_profile(C, base, grid, e)
            summary.append({"prior_kind": kind, **rep.summary()})
            if args.out:
                with open(os.path.join(args.out, f"{kind}_eps{e:g}.csv"), "w") as fh:
                    sensitivity.write_report_csv([rep], fh)
    doc = json.dumps(summary, indent=2)
    if args.out:
        with open(os.path.join(args.out, "summary.json"), "w") as fh:
            fh.write(doc + "\n")
    out.write(doc + "\n")


def cmd_oracle(args, out):
    seq, _ = io.read_fasta(args.fasta)
    widths = parse_ints(args.widths) if args.widths else []
    priors = _priors(args.priors, len(widths))
    numerator = scoring.exact_bayes_numerator(seq, priors, widths, args.cap)
    null = scoring.null_log_marginal(seq.letter_counts(), priors.alpha)
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["quantity", "value"])
    writer.writerow(["log_numerator", fmt(numerator)])
    writer.writerow(["log_null_marginal", fmt(null)])
    writer.writerow(["log_bayes_factor", fmt(numerator - null)])
    writer.writerow(["alignments", scoring.count_alignments(seq, widths, limit=args.cap)])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="motifmap", description="MAP-score model selection for motif dictionaries")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="generate a sequence with planted motifs")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--theta0", help="background frequencies, e.g. 0.25,0.25,0.25,0.25")
    s.add_argument("--motif", action="append", default=[],
                   help="w:c:k where k is a composition list, a consensus word or a PWM file")
    s.add_argument("--exact", action="store_true", help="plant identical copies of PWM consensus words")
    s.add_argument("--seed", type=int)
    s.add_argument("--out", help="output prefix for .fa and .truth.json (default: FASTA to stdout)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("score", help="logMAP and competing criteria for one alignment")
    s.add_argument("--fasta", required=True)
    s.add_argument("--alignment", help="JSON with widths and sites")
    s.add_argument("--priors")
    s.add_argument("--null-align", action="store_true", help="score the empty alignment")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("discover", help="progressive motif discovery")
    s.add_argument("--fasta", required=True)
    s.add_argument("--widths", default="8")
    s.add_argument("--max-motifs", type=int, default=3)
    s.add_argument("--iters", type=int, default=5000)
    s.add_argument("--burnin", type=int, default=1000)
    s.add_argument("--chains", type=int, default=5)
    s.add_argument("--seed", type=int)
    s.add_argument("--priors")
    s.set_defaults(func=cmd_discover)

    s = sub.add_parser("divergence", help="divergence-rate grid over (c, w)")
    s.add_argument("--profile", choices=("symmetric", "repeat", "custom"), default="symmetric")
    s.add_argument("--theta0")
    s.add_argument("--k")
    s.add_argument("--w-range", default="2:50")
    s.add_argument("--c-range", default="0.001:0.02:20")
    s.add_argument("--d", type=int, default=4)
    s.add_argument("--max", action="store_true", help="add the symmetric-profile value as a max column")
    s.add_argument("--out")
    s.set_defaults(func=cmd_divergence)

    s = sub.add_parser("sensitivity", help="epsilon-contamination profiles over a delta* grid")
    s.add_argument("--counts", required=True, help="CSV with 4 rows (A,C,G,T) of column counts")
    s.add_argument("--gamma", help="explicit base pseudo-counts for the equal prior")
    s.add_argument("--gamma-total", type=float, default=1.0)
    s.add_argument("--composition", help="letter composition for the data prior")
    s.add_argument("--epsilon", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    s.add_argument("--grid-points", type=int, default=99)
    s.add_argument("--prior-kind", default="equal", help="comma list of equal, data, mix3, mix9")
    s.add_argument("--out", help="directory for per-(kind, epsilon) CSVs and summary.json")
    s.set_defaults(func=cmd_sensitivity)

    s = sub.add_parser("oracle", help="exact Bayes-factor numerator by enumeration")
    s.add_argument("--fasta", required=True)
    s.add_argument("--widths", default="")
    s.add_argument("--priors")
    s.add_argument("--cap", type=int, default=scoring.DEFAULT_CAP)
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except InstanceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except DomainViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

import io
import json

import numpy as np
import pytest

from motifmap.cli import main
from motifmap.io import read_fasta
from motifmap.model import PriorSpec, count_sites
from motifmap.scoring import log_map


def run(argv):
    out = io.StringIO()
    code = main(argv, out)
    return code, out.getvalue()


def as_table(text):
    rows = [line.split(",") for line in text.strip().splitlines()[1:]]
    return {k: float(v) for k, v in rows}


@pytest.fixture
def planted_files(tmp_path):
    prefix = str(tmp_path / "sim")
    code, _ = run(["simulate", "--n", "3000", "--motif", "8:0.006:TATAATGC", "--seed", "3", "--out", prefix])
    assert code == 0
    return prefix


def test_simulate_requires_n():
    with pytest.raises(SystemExit) as exc:
        run(["simulate"])
    assert exc.value.code == 2


def test_simulate_is_byte_reproducible():
    a = run(["simulate", "--n", "500", "--motif", "6:0.01:0.25,0.25,0.25,0.25", "--seed", "9"])
    b = run(["simulate", "--n", "500", "--motif", "6:0.01:0.25,0.25,0.25,0.25", "--seed", "9"])
    assert a == b and a[1].startswith(">")


def test_simulate_with_pwm_file(tmp_path):
    pwm = tmp_path / "pwm.json"
    pwm.write_text(json.dumps([[0.9, 0.1], [0.1, 0.9], [0.0, 0.0], [0.0, 0.0]]))
    code, out = run(["simulate", "--n", "200", "--motif", f"2:0.05:{pwm}", "--seed", "1"])
    assert code == 0


def test_score_matches_library(planted_files):
    code, out = run(["score", "--fasta", planted_files + ".fa", "--alignment", planted_files + ".truth.json"])
    assert code == 0
    table = as_table(out)
    seq, _ = read_fasta(planted_files + ".fa")
    truth = json.load(open(planted_files + ".truth.json"))
    starts = np.array([s for s, _ in truth["sites"]])
    counts = count_sites(seq.data, 4, (8,), starts, np.zeros_like(starts))
    assert table["log_map"] == pytest.approx(log_map(counts, PriorSpec.default()).log_map, rel=1e-11)
    assert table["log_map"] > 0
    assert {"AIC_motif", "BIC_null", "KLI_motif"} <= table.keys()


def test_score_null_alignment_prints_zero(planted_files):
    code, out = run(["score", "--fasta", planted_files + ".fa", "--null-align"])
    assert code == 0 and as_table(out)["log_map"] == 0.0


def test_score_malformed_json(planted_files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["score", "--fasta", planted_files + ".fa", "--alignment", str(bad)])[0] == 2


def test_discover_planted_and_cap(planted_files):
    code, out = run(["discover", "--fasta", planted_files + ".fa", "--widths", "8", "--iters", "150",
                     "--burnin", "50", "--chains", "2", "--seed", "1", "--max-motifs", "2"])
    assert code == 0
    doc = json.loads(out)
    assert doc["accepted"] == 1 and doc["motifs"][0]["consensus"] == "TATAATGC"
    assert doc["motifs"][0]["delta_log_map"] > 0
    assert run(["discover", "--fasta", planted_files + ".fa", "--max-motifs", "0"])[0] == 2


def test_discover_iid(tmp_path):
    prefix = str(tmp_path / "iid")
    run(["simulate", "--n", "2000", "--seed", "5", "--out", prefix])
    code, out = run(["discover", "--fasta", prefix + ".fa", "--widths", "6,8", "--iters", "120",
                     "--burnin", "40", "--chains", "2", "--seed", "2"])
    assert code == 0 and json.loads(out)["accepted"] == 0


def test_divergence_grid():
    code, out = run(["divergence", "--w-range", "2-50", "--c-range", "0.002:0.01:5", "--max"])
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "c,w,r,profile,max" and len(lines) == 1 + 49 * 5
    code, out = run(["divergence", "--w-range", "5,10", "--c-range", "0"])
    assert [line.split(",")[2] for line in out.strip().splitlines()[1:]] == ["0", "0"]


def test_divergence_short_motif_dips_below_zero():
    code, out = run(["divergence", "--profile", "custom", "--theta0", "0.35,0.15,0.18,0.32",
                     "--k", "0.6666666666666666,0,0,0.3333333333333334", "--w-range", "6",
                     "--c-range", "0.0005,0.01"])
    assert code == 0
    r = [float(line.split(",")[2]) for line in out.strip().splitlines()[1:]]
    assert r[0] < 0 < r[1]


def test_divergence_out_of_domain_cells_are_blank():
    code, out = run(["divergence", "--profile", "repeat", "--w-range", "10", "--c-range", "0.001,0.01"])
    assert code == 0
    cells = [line.split(",")[2] for line in out.strip().splitlines()[1:]]
    assert cells[0] != "" and cells[1] == ""


def test_divergence_invalid_profile_input():
    assert run(["divergence", "--profile", "custom", "--theta0", "0.5,0.6", "--k", "1,0"])[0] == 2


def test_sensitivity_outputs(tmp_path):
    counts = tmp_path / "counts.csv"
    counts.write_text("20,0,1\n0,20,0\n0,0,19\n1,1,1\n")
    outdir = tmp_path / "sens"
    code, out = run(["sensitivity", "--counts", str(counts), "--epsilon", "0.2,0.5", "--grid-points", "9",
                     "--prior-kind", "equal,mix3", "--out", str(outdir)])
    assert code == 0
    summary = json.loads(out)
    assert len(summary) == 4
    assert (outdir / "mix3_eps0.5.csv").read_text().splitlines()[0] == "delta_star,epsilon,d_m,d_k,d_e,log_map"
    code, out = run(["sensitivity", "--counts", str(counts), "--epsilon", "0.5", "--grid-points", "1"])
    assert json.loads(out)[0]["d_m_max"] == 0.0
    assert run(["sensitivity", "--counts", str(counts), "--epsilon", "1.5"])[0] == 2


def test_oracle(tmp_path):
    small = tmp_path / "small.fa"
    small.write_text(">s\nACGTAC\n")
    code, out = run(["oracle", "--fasta", str(small), "--widths", "2"])
    table = as_table(out)
    assert code == 0 and table["alignments"] == 13
    code, out = run(["oracle", "--fasta", str(small)])
    table = as_table(out)
    assert table["log_bayes_factor"] == pytest.approx(0.0, abs=1e-12)
    big = tmp_path / "big.fa"
    big.write_text(">b\n" + "ACGT" * 100 + "\n")
    assert run(["oracle", "--fasta", str(big), "--widths", "3"])[0] == 3


def test_domain_violation_maps_to_exit_four(monkeypatch):
    from motifmap import asymptotics
    from motifmap.errors import DomainViolation

    def boom(*args, **kwargs):
        raise DomainViolation("outside domain")

    monkeypatch.setattr(asymptotics, "df_grid", boom)
    assert run(["divergence"])[0] == 4

"""Sensitivity of a GC-rich motif's logMAP to the column prior.

The base column prior is contaminated by a family of priors indexed by
delta*.  A narrower logMAP range over that family means the score depends
less on the exact prior choice.
"""
import numpy as np

from motifmap.model import count_sites
from motifmap.sensitivity import DeltaGrid, column_prior, delta_grid_profile
from motifmap.simulate import PlantedMotif, generate

bg = np.array([0.3116, 0.1914, 0.1761, 0.3208])
motif = np.array([0.1218, 0.3908, 0.2983, 0.1891])
bg, motif = bg / bg.sum(), motif / motif.sum()
seq, truth = generate(5000, bg, [PlantedMotif(17, 20 / 5000, composition=tuple(motif))], 0)
C = count_sites(seq.data, 4, (17,), truth.starts, truth.kinds).column_counts[0]

grid = DeltaGrid.uniform()
print("epsilon " + " ".join(f"{k:>7s}" for k in ("equal", "data", "mix3", "mix9")))
for eps in (0.1, 0.3, 0.5, 0.7, 0.9):
    spreads = [delta_grid_profile(C, column_prior(k, composition=motif), grid, eps).spread
               for k in ("equal", "data", "mix3", "mix9")]
    print(f"{eps:7.1f} " + " ".join(f"{s:7.3f}" for s in spreads))

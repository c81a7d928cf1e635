"""
Reading a spectrum: block census, diversity, shortlists
=======================================================

Once a low-energy spectrum is in hand, three questions come up.  Which
blocks does every good solution remove?  How different are the top
solutions from each other?  And which few solutions should a person
actually look at?
"""

import numpy as np

import blockspectrum as bs

rng = np.random.default_rng(31)
a = rng.normal(size=(14, 14))
# bias the diagonal so a few blocks are clearly cheap to drop
d = np.abs(np.diagonal(a)) + np.r_[np.full(4, 0.1), np.full(10, 2.0)]
h = bs.Hessian((a + a.T) / 2 + np.diag(d))

spec = bs.solve_topk(bs.ExactSolveRequest(hessian=h, m=5, k=10))

rep = bs.removal_frequency(spec, 10)
print("removal census over the top 10 states:")
for block, count in enumerate(rep.counts):
    bar = "#" * count
    print(f"  block {block:2d}  {count:2d}  {bar}")

always = [i for i, c in enumerate(rep.counts) if c == 10]
never = [i for i, c in enumerate(rep.counts) if c == 0]
print("removed by every state:", always)
print("removed by none:", never)

dist = bs.pairwise_distance(spec)
print("\npairwise Hamming distances (top 5 shown):")
print(dist[:5, :5])
print("mean off-diagonal distance:", round(float(dist[np.triu_indices(10, 1)].mean()), 2))

# a diverse shortlist: the ground state plus states far from what is
# already chosen, kept small enough to inspect by hand
short = bs.select_diverse(spec, 3)
print("\ndiverse shortlist:")
for sol in short:
    rank = next(r for r, s in enumerate(spec.solutions) if s == sol)
    print(f"  {bs.rank_label(rank)}  removed {sol.config.removed}  energy {sol.energy:+.4f}")

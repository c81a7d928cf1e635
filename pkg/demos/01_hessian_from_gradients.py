"""
From per-sample gate gradients to a removal-energy Hessian
==========================================================

Each calibration sample contributes one row of gradients, one entry per
block gate.  Averaging the outer products of those rows gives the
quadratic model this package ranks removals with.
"""

import numpy as np

import blockspectrum as bs

rng = np.random.default_rng(404)

# fake a calibration run: 256 samples, 10 blocks, later blocks matter less
samples = rng.normal(size=(256, 10)) * np.linspace(1.0, 0.2, 10)
grads = bs.GradientMatrix(samples)

diag = bs.gradient_diagnostic(grads)
print("samples:", grads.m, " blocks:", grads.n)
print("mean gradient norm:", round(diag["mean_grad_norm"], 4))
print("per-block rms:", np.round(diag["per_block_rms"], 3))

hessian = bs.build_hessian(grads)
print("\nHessian diagonal (per-block curvature):")
print(np.round(np.diagonal(hessian.entries), 3))
print("positive semidefinite:", hessian.is_positive_semidefinite())

# the diagonal already tells a story: blocks built with small gradients are
# cheap to remove on their own
cheapest = int(np.argmin(np.diagonal(hessian.entries)))
print("cheapest single removal by diagonal:", cheapest)

# but single-block curvature ignores interactions; the off-diagonal terms
# decide which PAIRS are cheap, which is the whole point of solving the
# coupled problem instead of sorting the diagonal
spec = bs.solve_topk(bs.ExactSolveRequest(hessian=hessian, m=2, k=3))
for rank, sol in enumerate(spec.solutions):
    print(f"{bs.rank_label(rank)}: remove {sol.config.removed}  energy {sol.energy:.4f}")

# round-trip through the on-disk formats
bs.save_gradients(grads, "/tmp/demo.grad")
bs.save_hessian(hessian, "/tmp/demo.hess")
again = bs.load_hessian("/tmp/demo.hess")
print("\nfile round trip exact:", np.array_equal(again.entries, hessian.entries))

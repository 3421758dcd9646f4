"""Deblur a short video blurred frame by frame with a Gaussian PSF.

The blur operator is badly conditioned, so progress is slow; a longer
budget keeps lowering the error.

Run: python3 demos/deconvolution.py
"""
import numpy as np

from l1pk.experiments import deconv_problem, metric_psnr, metric_re, psf_gaussian
from l1pk.solvers import SolverConfig, solve

rng = np.random.default_rng(0)
video = rng.random((8, 3, 8, 2))
prob = deconv_problem(video, psf_gaussian(3, 0.8))
print("operator", prob.A.shape, "unknown", prob.x_shape)

cfg = SolverConfig(t=0.5, lam=1e-4, p=2, max_iters=3000, tol=1e-10)
X, trace = solve(prob, cfg)
truth = prob.ground_truth
print(f"RE {metric_re(X, truth):.3e}  PSNR {metric_psnr(truth, X):.1f} dB"
      f"  after {len(trace.re) - 1} iterations")

"""
Robust MMSE estimation of a scalar signal
=========================================

x and y are jointly normal with covariance [[1, 1], [1, 1.1]]. As the
radius of the ambiguity ball grows, the least favorable prior inflates the
signal variance and weakens the correlation, and the robust gain shrinks
toward zero.
"""

import numpy as np

from wkf import FWConfig, solve_robust_mmse
from wkf.oracles import tiny_instance_search

Sigma = np.array([[1.0, 1.0], [1.0, 1.1]])

print(" rho     S_xx     S_yy     S_xy     gain   worst MSE  brute force")
for rho in (0.0, 0.1, 0.25, 0.5, 1.0, 2.0):
    eq = solve_robust_mmse(np.zeros(2), Sigma, 1, 1, FWConfig(rho=rho))
    S = eq.least_favorable.cov
    brute, _, _ = tiny_instance_search(Sigma, rho)
    print(f"{rho:4.2f} {S[0, 0]:8.4f} {S[1, 1]:8.4f} {S[0, 1]:8.4f} "
          f"{eq.estimator.G[0, 0]:8.4f} {eq.worst_case_mse:10.6f} {brute:10.6f}")

# the estimator is an ordinary affine map
eq = solve_robust_mmse([1.0, 2.0], Sigma, 1, 1, FWConfig(rho=0.5))
print("estimate at y = 2.5:", eq.estimator([2.5]))

"""
Gelbrich balls of Gaussian covariances
======================================

Distances between normal distributions and the boundary of the ball of
radius 1 around the 2x2 identity.
"""

import numpy as np

from wkf import Gaussian, cov_transport_cost, gelbrich_distance
from wkf.experiments import ball_surface_samples

# equal covariances: only the means contribute
print(gelbrich_distance(Gaussian([0, 0], np.eye(2)), Gaussian([1, 0], np.eye(2))))

# commuting covariances: per-eigenvalue differences of square roots
print(cov_transport_cost(np.diag([4.0, 1.0]), np.eye(2)))

pts = ball_surface_samples(1.0, resolution=24)
print(f"{len(pts)} boundary points")
print("S11 range", pts[:, 0].min(), pts[:, 0].max())
print("S12 range", pts[:, 2].min(), pts[:, 2].max())

# the ball is lopsided: it stretches much further up than down because
# the cost grows like the square root of the eigenvalues
print("largest S11 on the diagonal slice", pts[np.abs(pts[:, 2]) < 1e-12, 0].max())

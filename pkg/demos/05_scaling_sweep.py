"""Monte-Carlo sweep of the scaling inequalities over random thin simplices.

Each inequality is evaluated with its unknown constant set to 1; what
matters is that the sup of lhs / rhs stays finite over very anisotropic
samples. The sweep is seeded, so rerunning prints identical numbers.
"""

import sys

from aniso_rt.experiments import SCALING_LEMMAS, scaling_sweep

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
print(f"seed {seed}")
for which in SCALING_LEMMAS:
    d = 3 if which.startswith("RT14") else 2
    res = scaling_sweep(which, d, n_samples=200, seed=seed)
    print(f"{which:6s} d={d}  sup ratio {res['sup_ratio']:.4f}")

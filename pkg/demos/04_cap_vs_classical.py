"""Flattening caps: the largest angle tends to pi and H_T0 / h blows up.

The error of the interpolant grows at the same rate, so the quotient
error / bound stays flat for both the anisotropic and the classical
h / rho bound on this sequence.
"""

import numpy as np

from aniso_rt import cap_series, get_field

rows = cap_series(field=get_field("trig", 2))
print(f"{'eps':>8} {'max angle':>10} {'H/h':>10} {'error':>10} {'RT61':>8} {'classical':>9}")
for r in rows:
    print(
        f"{r['eps']:8.0e} {np.degrees(r['max_angle']):10.5f} {r['H_over_h']:10.3e} "
        f"{r['lhs']:10.3e} {r['ratio']['RT61']:8.4f} {r['ratio']['classical']:9.4f}"
    )

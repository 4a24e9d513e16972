"""The lowest-order interpolant mixes components.

For v = (0, x2^2) on the reference triangle every component-wise estimate
of the form ||(Iv)_1 - v_1|| <= c |v_1|_{H^1} must fail, because the right
side vanishes while I v = (x1/3, x2/3) has a nonzero first component.
"""

import numpy as np

from aniso_rt import build_space, interpolate_reference, simplex_rule
from aniso_rt.fields import counterexample_field

space = build_space(0, 2)
v = counterexample_field()
Iv = interpolate_reference(space, v)
print("coefficients in the face basis:", Iv.coefficients)

rule = simplex_rule(2, 8)
x = rule.points
print("max |Iv - x/3| at quadrature points:", np.abs(Iv.evaluate(x) - x / 3).max())

err1 = np.sqrt(rule.weights @ (Iv.evaluate(x)[:, 0] - v.value(x)[:, 0]) ** 2)
print(f"||(Iv)_1 - v_1||_L2 = {err1:.10f}; closed form 1/(6 sqrt 3) = {1 / (6 * np.sqrt(3)):.10f}")
print("|v_1|_H1 = 0, so no constant c can work.")

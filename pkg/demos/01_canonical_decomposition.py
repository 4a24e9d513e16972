"""Take a thin tetrahedron apart into a rigid motion, a shear and axis scalings.

Run with ``python3 demos/01_canonical_decomposition.py``.
"""

import numpy as np

from aniso_rt import angle_report, canonical_decompose, condition_numbers

np.set_printoptions(precision=4, suppress=True)

# A flat tetrahedron: long in x, thin in y and z, with the apex leaning past
# the bisecting plane of its longest short-edge neighbour.
V = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.02, 0.0], [0.1, 0.01, 0.03]])
dec = canonical_decompose(V)

print("vertex order (x1..x4):", dec.vertex_permutation)
print("type:", dec.case_type, "-> reference", dec.reference_id)
print("alphas:", dec.alphas)
print("shear parameters:", {k: round(v, 4) for k, v in dec.tilde_params.items()})
print("reconstruction error:", np.abs(dec.reconstruct() - V[list(dec.vertex_permutation)]).max())

cn = condition_numbers(dec)
print(f"|det A_T| = {cn['det_AT']:.6e}  (6|T| = {6 * angle_report(V).volume:.6e})")
print(f"||A_tilde||_2 = {cn['norm_Atilde']:.4f}, cond(A_tilde) = {cn['cond_Atilde']:.4f}, cond(A_hat) = {cn['cond_Ahat']:.1f}")

rep = angle_report(V)
print(f"h = {rep.h:.4f}, H_T = {rep.H_T:.4f}, H_T0 = {rep.H_T0:.4f}, H_T0/h = {rep.ratio_H_h:.3f}")
print(f"largest face angle {np.degrees(rep.max_angle):.1f} deg, largest dihedral {np.degrees(rep.max_dihedral):.1f} deg")
print("direction-weighted lengths:", np.array(rep.mathscr_H))

"""Error and bound ratios on a family of needles with alpha_2 = alpha_1^2.

The needles become arbitrarily thin but keep a right angle, so the
anisotropic bound should hold with a level-independent constant: the
ratio lhs / rhs settles down instead of growing.
"""

from aniso_rt import FamilySpec, get_field, run_family_study
from aniso_rt.experiments import sup_growth

spec = FamilySpec("needle_2d", levels=6, gamma=2.0)
rows = run_family_study(spec, k=0, field=get_field("trig", 2), p=2)

print(f"{'level':>5} {'h':>10} {'H/h':>7} {'error':>11} {'RT61':>8} {'RT62':>8} {'classical':>9}")
for r in rows:
    print(
        f"{r.level:5d} {r.h:10.3e} {r.H_over_h:7.3f} {r.lhs:11.3e} "
        f"{r.ratio['RT61']:8.4f} {r.ratio['RT62']:8.4f} {r.ratio['classical']:9.4f}"
    )
print(f"growth of the RT62 ratio after level 3: {sup_growth(rows, 'RT62'):.4f}")

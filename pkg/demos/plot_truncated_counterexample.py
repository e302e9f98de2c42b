"""
An infinite counterexample cut down to four points
==================================================

phi(x, y) = x - y away from the origin and 0 on the row of the origin.  Its
balls are nested intervals, yet the two-argument subadditivity fails at the
origin, and the checker points at the first bad triple.
"""

from ballspace import FiniteMetricSpace, OtFunction, check_ot_axioms, ot_assignment, check_strongly_contractive

line = FiniteMetricSpace.on_line([0, 1, 2, 3])
phi = OtFunction(tuple(tuple(0 if x == 0 else x - y for y in range(4)) for x in range(4)))

report = check_ot_axioms(phi, line)
for v in report.violations:
    print(v.render(line.labels), v.detail)

# The ball family on its own is still strongly contractive
print("contractive violations:", check_strongly_contractive(ot_assignment(line, phi)))

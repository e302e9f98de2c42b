"""
Fixed points by singleton descent
=================================

Three points on a path, a potential that decreases along it, and a self-map
that never leaves its ball.  Descent walks to a singleton ball, which is the
fixed point.
"""

from ballspace import (
    CkFunction,
    FiniteMetricSpace,
    SelfMap,
    caristi_fp,
    ck_assignment,
    ck_to_ot,
    ekeland_altered,
)

space = FiniteMetricSpace.from_matrix([[0, 1, 2], [1, 0, 1], [2, 1, 0]], "abc")
varphi = CkFunction((3, 1, 0))

# Balls B_x = {y : d(x,y) <= varphi(x) - varphi(y)}
balls = ck_assignment(space, varphi)
for x in space.points:
    print(space.labels[x], sorted(space.labels[y] for y in balls[x]))

# The same balls come from the two-argument form phi(x,y) = varphi(y) - varphi(x)
phi = ck_to_ot(varphi)
cert = caristi_fp(space, phi, SelfMap((1, 2, 2)))
print("fixed point:", space.labels[cert.witness], "trace:", cert.trace.render(space.labels))

# Doubling the ratio shrinks every ball, so descent from a stops earlier
cert = ekeland_altered(space, phi, 2, 0)
print("gamma=2 witness:", space.labels[cert.witness], "valid:", cert.valid)

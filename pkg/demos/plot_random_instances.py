"""
Property sweep over generated instances
=======================================

Each seed gives a metric, a two-argument function built by shortest-path
closure, and one-argument functions with and without +inf values.  Every
property in the suite is checked exhaustively.
"""

from collections import Counter

from ballspace import PLUS_INFINITY, generate_instance
from ballspace.lemmas import verify_instance

tally = Counter()
with_inf = 0
for seed in range(1, 31):
    g = generate_instance(seed, 2 + seed % 11)
    with_inf += any(v is PLUS_INFINITY for row in g.ot.values for v in row)
    for r in verify_instance(g.space, ck=g.ck, ckinf=g.ckinf, ot=g.ot):
        tally[r.name, r.ok] += 1

for (name, ok), count in sorted(tally.items()):
    print(f"{name:28s} {'ok ' if ok else 'BAD'} x{count}")
print("instances with +inf entries:", with_inf)

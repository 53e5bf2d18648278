"""
Centers of bitransitive components
==================================

Locate the post-critically finite centers with rotation number p/q for all
q up to 13, verify them, and compare the lap-count entropy of each center
with the log of the largest root of t^q - 2t^(q-1) + 1.
"""
from math import gcd

from modspace.entropy import lap_entropy, root_of_Pq
from modspace.pcf import find_center, verify_center

print(f"{'p/q':>6} {'sigma1':>12} {'sigma2':>12} {'lap':>9} {'root':>9}  checks")
for q in range(3, 14):
    for p in range(1, q):
        if 2 * p > q or gcd(p, q) != 1:
            continue
        c = find_center(q, p)
        rep = verify_center(c)
        h = lap_entropy(c.map).value
        s1, s2 = c.moduli.as_tuple()
        print(f"{p:>3}/{q:<2} {s1:12.5f} {s2:12.5f} {h:9.6f} {root_of_Pq(q).value:9.6f}  "
              f"{'ok' if rep.passed else 'FAILED'}")

# the centers with numerator one all sit on the vertical line sigma1 = -6,
# and their entropies climb toward log 2 as q grows

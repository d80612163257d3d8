#!/usr/bin/env python3
"""Print intersection censuses of the three leaf models side by side."""
from nexpansive.foliation import census, family

for kind in ("inversion-circles", "cubic", "quartic"):
    s = census(family(kind)).summary()
    print(f"{kind:18s} max intersections {s['max_count']}  "
          f"max contact order {s['max_contact_order']}  "
          f"tangencies {s['n_tangencies']}  first attained at {s['attaining_first']}")

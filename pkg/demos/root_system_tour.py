"""Root systems, their groups and the constants attached to each multiplicity.

    python demos/root_system_tour.py
"""
import json

from dunklhardy.cli import describe
from dunklhardy.roots import make_context

for family, rank, k in [("A", 2, 0.5), ("B", 2, (0.25, 1.0)), ("D", 4, 0.5), ("I2", 5, 1.0), ("Z2", 3, 0.0)]:
    info = describe(make_context(family, rank, k))
    short = {key: info[key] for key in ("family", "N", "group_order", "chambers", "gamma", "homogeneous_dim")}
    print(json.dumps(short))
    print("   constants:", json.dumps(info["constants"]))

# coding: utf-8

# # Center arcs across the twist region, and what the twist does to homology

# In[1]:

import numpy as np

from phtwist.center import (center_cocycle_bound, compact_leaf_band, displacement_field,
                            integrate_arc)
from phtwist.homology import GAMMA_2, act, twist_action

arc = integrate_arc((0.0, 0.0))
print("compact s-leaf arc exits at", arc.exit, "after length", arc.arc_length)
arc = integrate_arc((0.25, 0.0))
print("compact u-leaf arc exits at", arc.exit, "(it never moves)")


# Displacement of every center arc on a 64 x 64 grid.  Only entries next to
# the four compact leaves come close to an integer vector.

# In[2]:

field = displacement_field(64)
band = compact_leaf_band(field.x0, 0.02)
print("min distance to the lattice off the bands:", field.dist_to_lattice[~band].min())
print("max arc length:", field.arc_length.max())


# Center vectors stay within a bounded factor under iteration.

# In[3]:

print("K =", center_cocycle_bound(), " bound:", np.sqrt(1 + 2.34375**2))


# On homology the twist adds one copy of [g1] per crossing of T1.

# In[4]:

print(twist_action(1), act(twist_action(3), GAMMA_2))

# coding: utf-8

# # Two transverse foliations of the boundary torus
#
# The s-foliation is built from the convex profile alpha(x) = -log sin(2 pi x)
# on each half of the circle; the u-foliation is its translate by 1/4.

# In[1]:

from pathlib import Path

import numpy as np

from phtwist.foliations import ModelFoliations, ReciprocalProfile
from phtwist.svg import foliations_svg

fol = ModelFoliations()
xs = np.array([0.0, 0.125, 0.25, 0.375, 0.5])
print("s angles:", fol.s_direction(xs))
print("u angles:", fol.u_direction(xs))


# The smallest angle between the two line fields.  For this profile it has a
# closed form, arctan(4 pi / (4 pi^2 - 1)), reached at odd multiples of 1/8.

# In[2]:

angle, where = fol.pair_margin(4096)
print(angle, where, np.arctan(4 * np.pi / (4 * np.pi**2 - 1)))


# Any other admissible profile works too, only the numbers change.

# In[3]:

print(ModelFoliations(ReciprocalProfile()).pair_margin(4096))


# Draw both families; the four compact leaves are the thick vertical lines.

# In[4]:

out = Path("demo_out")
out.mkdir(exist_ok=True)
(out / "foliations.svg").write_text(foliations_svg(fol))
print("wrote", out / "foliations.svg")

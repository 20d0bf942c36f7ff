# coding: utf-8

# # The DA map on the torus
#
# Start from the cat-like matrix m = [[3, 1], [2, 1]] and blow its two fixed
# points up into sources by a push along the stable direction.

# In[1]:

import numpy as np

from phtwist.torus import (DAMap, SuspensionPoint, angle_distance, finite_time_stable_direction,
                           ftle, stable_angle)

da = DAMap()
print("sources:", da.sources.tolist())
print("stable / unstable eigenvalues:", da.lam_s, da.lam_u)


# The derivative at a source is m composed with the push, so the stable
# eigenvalue 2 - sqrt(3) gets multiplied by exp(1.75).

# In[2]:

for s in da.sources:
    print(s, np.abs(np.linalg.eigvals(da.derivative(s))))


# Away from the bumps the map is linear, so backward iteration recovers the
# linear stable direction almost immediately.

# In[3]:

rng = np.random.default_rng(0)
pts = da.sample_bump_avoiding(100, 60, rng)
err = angle_distance(finite_time_stable_direction(da, pts, 60), stable_angle(da))
print("worst stable-direction error:", err.max())


# Lyapunov exponents of the suspension flow at t = 50.  The middle one is the
# flow direction and comes out exactly zero.

# In[4]:

for p in da.iterate(rng.random((5, 2)), 20):
    print(ftle(da, SuspensionPoint(p, 0.0), 50.0))
print("ln(2 + sqrt 3) =", np.log(2 + np.sqrt(3)))

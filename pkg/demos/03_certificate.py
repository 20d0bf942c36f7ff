# coding: utf-8

# # How long a flow segment does the twist need?
#
# The strong lines carry a tilt c along the flow.  Compressing a flow segment
# of length N into the unit model interval turns it into c/N, and the twist
# shears the pushed bundles by rho'(t).

# In[1]:

import numpy as np

from phtwist.certificate import check_transversality, deficit_slope, limit_margin, n0_search, sweep

print("margin with no tilt at all:", limit_margin())


# Search for the smallest N with both margins at least 0.05 for every tilt
# |c| <= 2.

# In[2]:

res = n0_search(threshold=0.05, c_max=2.0)
print("N0 =", res.n0, "after", len(res.evaluations), "evaluations")
for n in (res.n0, 2 * res.n0):
    rep = check_transversality(n)
    print(n, rep.margin_cs_uu, rep.margin_cu_ss, rep.argmin_cs_uu)


# The gap to the limit closes like 1/N.

# In[3]:

reps = sweep([16 * 2**k for k in range(9)])
for r in reps:
    print(f"{r.n:6.0f}  {r.margin:.6f}")
print("log-log slope:", deficit_slope(reps, limit_margin()))

# %% [markdown]
# # Letting q approach 1 together with n
#
# The classical Bernstein operator satisfies n (B_n f - f) -> f''/2 x(1-x).
# Does the Lupaş operator do the same with q = q_n -> 1?  It depends on
# how fast q_n approaches 1.
#
# With q_n = 1 - 1/n the product q_n^n tends to 1/e rather than 1, and the
# scaled error levels off.  On t^2 this can be seen by hand: the second
# moment gives
#
#     [n] (R_n(t^2) - x^2) = [n] x (v - x) + x (1 - v)
#
# with v - x = -x(1 - x)/(n - x) and [n] -> n (1 - 1/e), so the limit is
# x(1 - x)(1 - (1 - 1/e) x) instead of x(1 - x).  The largest gap,
# (1 - 1/e) * 4/27 ~ 0.0936, sits at x = 2/3.
#
# With q_n = 1 -+ 1/n^2 one has q_n^n -> 1 and the error decays like 1/n.
#
# Run:  python3 demos/classical_limit.py

# %%
import math

import numpy as np

from qlupas.verify import classical_limit_errors, classical_scaled

# %%
ns = (32, 128, 512, 2048)
for schedule in ("1-1/n", "1+1/n", "1-1/n^2", "1+1/n^2"):
    print(f"\nq_n = {schedule}")
    for name in ("quad", "cubic", "exp"):
        errs = classical_limit_errors(name, schedule, ns=ns)
        print(f"  {name:>5}: " + "  ".join(f"n={n}: {e:.3e}" for n, e in zip(ns, errs)))

# %% [markdown]
# ## The plateau on t^2 matches the hand computation

# %%
x = np.linspace(0, 1, 301)
n = 4096
scaled, target = classical_scaled("quad", n, "1-1/n", x)
predicted = x * (1 - x) * (1 - (1 - 1 / math.e) * x)
print(f"\nn={n}: max |scaled - predicted limit| = {np.max(np.abs(scaled - predicted)):.2e}")
print(f"       max |scaled - x(1-x)|          = {np.max(np.abs(scaled - target)):.4f}"
      f"  (predicted {(1 - 1 / math.e) * 4 / 27:.4f})")

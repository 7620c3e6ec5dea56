# %% [markdown]
# # How fast does R_{n,q} approach its limit?
#
# For fixed q < 1 the gap R_{n,q} f - R_{inf,q} f shrinks like q^n.  This
# script prints the grid sup of the gap next to the first-modulus bound
# 2/((1-q)(1-x)) omega(f, q^n) and the second-modulus scale
# omega_2(f, sqrt(q^n)), then repeats the exercise for q > 1 through the
# reflection g(t) = f(1 - t).
#
# Run:  python3 demos/convergence_rates.py

# %%
import math

import numpy as np

from qlupas import REGISTRY, eval_difference, q_integer, reflect, v_transform
from qlupas.moduli import modulus, modulus2
from qlupas.verify import x_grid

# %% [markdown]
# ## t^2: the gap has a closed form
# L_{n,q}(t^2, x) = q^n/[n] x (1 - v(q, x)), so the numerically computed gap
# should match it to the last digits.

# %%
q = 0.5
x = x_grid(q)
quad = REGISTRY["quad"]
print(f"{'n':>3} {'sup |R_n - R_inf|':>20} {'closed form':>14} {'ratio to q^n':>14}")
for n in (1, 2, 4, 8, 16, 32):
    gap = np.max(np.abs(eval_difference(q, n, quad, x)))
    closed = np.max(q ** n / q_integer(q, n) * x * (1 - v_transform(q, x)))
    print(f"{n:>3} {gap:>20.6e} {closed:>14.6e} {gap / q ** n:>14.6f}")

# %% [markdown]
# ## Rough and smooth functions against both bounds
# abs = |t - 1/2| is only Lipschitz; sin is smooth.  The ratio column is
# gap / omega_2(f, sqrt(q^n)), which stays bounded.

# %%
for name in ("abs", "sin", "abs3"):
    f = REGISTRY[name]
    print(f"\n{name}, q = {q}")
    print(f"{'n':>3} {'gap':>12} {'omega bound':>12} {'omega_2':>12} {'ratio':>8}")
    for n in (1, 4, 8, 16, 24):
        gap = float(np.max(np.abs(eval_difference(q, n, f, x))))
        b1 = 2 / ((1 - q) * (1 - x[-1])) * modulus(f, q ** n)
        b2 = modulus2(f, math.sqrt(q ** n))
        print(f"{n:>3} {gap:>12.4e} {b1:>12.4e} {b2:>12.4e} {gap / b2:>8.4f}")

# %% [markdown]
# ## q > 1
# For q = 2 the operator mirrors the q = 1/2 one: the gap decays like
# q^-n and the bound uses g = f(1 - .) on [1/64, 1].

# %%
q = 2.0
x = x_grid(q)
f = REGISTRY["cubic"]
g = reflect(f)
print(f"\ncubic, q = {q}")
for n in (1, 4, 8, 16):
    gap = float(np.max(np.abs(eval_difference(q, n, f, x))))
    b1 = 2 * q / ((q - 1) * x[0]) * modulus(g, q ** -n)
    print(f"n={n:>2}  gap={gap:.4e}  bound={b1:.4e}  gap*q^n={gap * q ** n:.4f}")

# %% [markdown]
# # Scaled gaps and the second derivative
#
# Multiplying the gap by [n]/q^n isolates a second-derivative term:
#
#     [n]/q^n (R_n f - R_inf f)(x)  ~  f''(x)/2 * x (1 - v(q, x))
#
# For f = t^2 this is an identity at every n.  For other smooth functions
# the residual is controlled by x(1 - v) omega(f'', [n]^-1/2); the ratio of
# the two, maximised over a grid, is the empirical constant K.
#
# Run:  python3 demos/voronovskaja.py

# %%
import numpy as np

from qlupas import REGISTRY
from qlupas.verify import check_voronovskaja, voronovskaja_residual, voronovskaja_supercritical

x = np.linspace(0, 63 / 64, 65)

# %% [markdown]
# ## t^2: exact at every n

# %%
for q in (0.3, 0.9):
    worst = max(np.max(voronovskaja_residual(q, "quad", n, x)[0]) for n in range(1, 33))
    print(f"q={q}: max residual over n <= 32 = {worst:.2e}")

# %% [markdown]
# ## t^3 at q = 1/2, n = 2, x = 1/2
# The gap is 11/135, so the scaled gap is 6 * 11/135 = 22/45 against a
# target of 1/2: residual 1/90.

# %%
res, bound = voronovskaja_residual(0.5, "cubic", 2, 0.5)
print(f"residual = {res:.15f}   1/90 = {1 / 90:.15f}   bound scale = {bound:.4f}")

# %% [markdown]
# ## Residual against bound as n grows

# %%
for name in ("cubic", "exp", "sin"):
    print(f"\n{name}, q = 0.5")
    for n in (1, 2, 4, 8, 16, 32):
        res, bound = voronovskaja_residual(0.5, name, n, x)
        keep = bound > 0
        print(f"  n={n:>2}  max residual={res.max():.3e}  max residual/bound={np.max(res[keep] / bound[keep]):.4f}")

# %% [markdown]
# ## q > 1 uses f''(x)
# Through the reflection the q > 1 statement is the q < 1 one for
# g = f(1 - .) at 1 - x, and g''(1 - x) = f''(x).  Using f''(1 - x) as the
# target instead pushes residual/bound well past the q < 1 constant for a
# non-symmetric f.

# %%
from qlupas import eval_difference, q_integer, v_transform

xs = 1 - x[::-1]
f = REGISTRY["cubic"]
q = 2.0
for n in (2, 8, 32):
    res, bound = voronovskaja_supercritical(q, f, n, xs)
    scaled = q ** n * q_integer(1 / q, n) * eval_difference(q, n, f, xs)
    weight = v_transform(q, xs) * (1 - xs)
    wrong = np.abs(scaled - 0.5 * f.d2(1 - xs) * weight)
    keep = bound > 0
    print(f"q=2, n={n:>2}: max residual/bound with f''(x) {np.max(res[keep] / bound[keep]):.3f}, "
          f"with f''(1-x) {np.max(wrong[keep] / bound[keep]):.3f}")

# %% [markdown]
# ## Empirical K and its stability under grid refinement

# %%
print(check_voronovskaja().line())
print(check_voronovskaja(qs=(10 / 3, 2.0, 10 / 9)).line())

# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Walks, bands and Krull-Schmidt
#
# The quiver K(3,2) has five vertices on a cycle: three clockwise arrows
# beta_0..beta_2 and two counter-clockwise arrows alpha_3, alpha_4.
# Every indecomposable is a walk module V_(p,q) or a band module V_d^λ.

# %%
import random

from atilde import (
    BandSpec,
    PrimeField,
    band_rep,
    build_k,
    change_basis,
    classify_walk,
    decompose,
    direct_sum,
    hom_dim,
    locate,
    random_invertible,
    walk_rep,
)

k = build_k(3, 2)
f = PrimeField(101)
print([(a.name, a.src, a.tgt) for a in k.arrows])

# %% [markdown]
# ## A walk module
#
# V_(4,10) has basis e_4..e_10; vertex x holds the e_i with i ≡ x mod 5.

# %%
v = walk_rep((4, 10), k, f)
print("dims", v.dims)
print("labels", v.labels)
print("beta_0 =", v.maps["beta_0"].tolist())
print("class", classify_walk((4, 10), k).tag)

# %% [markdown]
# ## Bands
#
# All maps are identities except beta_2, which carries λ·id + J.

# %%
b = band_rep(BandSpec(f(2), 2), k, f)
print(b.maps["beta_2"].tolist())
print("Hom(V_1^1, V_1^2) =", hom_dim(band_rep(BandSpec(f(1), 1), k, f), band_rep(BandSpec(f(2), 1), k, f)))

# %% [markdown]
# λ = 0 does not give a new object: the "band" V_1^0 is the walk V_(3,7).

# %%
print(decompose(band_rep(BandSpec(f(0), 1), k, f)))

# %% [markdown]
# ## Decomposing a scrambled direct sum
#
# Build V_(1,3) ⊕ V_(2,6) ⊕ V_2^5, hide it behind a random change of basis
# at every vertex, and recover the summands.

# %%
rng = random.Random(11)
parts = [walk_rep((1, 3), k, f), walk_rep((2, 6), k, f), band_rep(BandSpec(f(5), 2), k, f)]
s = direct_sum(parts)
scrambled = change_basis(s, [random_invertible(f, d, rng) for d in s.dims])
print(scrambled.maps["beta_2"].tolist()[:2])
found = decompose(scrambled)
for label, mult in found.items():
    print(label, "x", mult, "->", locate(label, k, f))

"""Compare the Nijenhuis tensor of a twist with the two transfer formulas.

On a non-integrable example the tensor of the twisted model matches
``N_I - (1 - L_I) F``; the bracket rule gives ``N_I + (1 - L_I) F``.
"""

from twistkit import bracket_nijenhuis, build_twisted_model, nijenhuis, nijenhuis_transfer
from twistkit.zoo import skt_non_instanton

ex = skt_non_instanton(1, 1, base="J")
M, T, I = ex.model, ex.twist, ex.complex()
W = build_twisted_model(M, T)

direct = nijenhuis(W, I)
plus = nijenhuis_transfer(M, T, I)
print("N_W on the twisted model:   ", direct)
print("N_I + (1 - L_I) F:          ", plus)
print("bracket rule agrees with +: ", bracket_nijenhuis(M, T, I) == plus)
print("N_W == N_I + (1 - L_I) F:   ", direct == plus)
print("N_W == -(N_I + (1 - L_I) F):", direct == -plus, "(N_I = 0 here)")

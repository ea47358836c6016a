"""Walk through the non-instanton HKT twist of flat R x T^3.

Run with ``python3 demos/halfline_hkt.py``.
"""

from twistkit import build_twisted_model, hkt_twist_condition, is_hkt, is_instanton, validate_twist_data
from twistkit.hermitian import apply_all
from twistkit.quaternionic import hkt_twist_terms
from twistkit.scalar import Scalar
from twistkit.zoo import halfline_t3

ex = halfline_t3()
M, T, g, H = ex.model, ex.twist, ex.metric(), ex.triple()

print("coframe:", ", ".join(M.coframe), "with d x0 =", M.format(M.differential(Scalar.var("x0"))))
print("twist data valid:", validate_twist_data(M, T).passed)
print("F is an instanton:", is_instanton(T.F, H))

# the J- and K-parts of F are not I-invariant, yet the three twist terms agree
print("I F_2 =", M.format(apply_all(H.I, T.F[1])))
print("I F_3 =", M.format(apply_all(H.I, T.F[2])))
for label, term in hkt_twist_terms(T, g, H).items():
    print(f"{label}-term =", M.format(term))

print("HKT twist condition:", hkt_twist_condition(M, T, g, H).passed)
W = build_twisted_model(M, T)
for name, d in zip(W.coframe, W.structure):
    print(f"  d{name} =", W.format(d))
print("twisted model is HKT:", is_hkt(W, g, H).passed)

"""Oriented binary trees: counts, signs, weights and ternary node values."""

from linfty.trees import (BETA, TAU, add_trees, all_six_tuples, enumerate_ot, node_value,
                          sign_e, six_to_triple, weight_w)

for n in range(1, 7):
    print(f"{n} leaves: {len(enumerate_ot(n))} trees")

print("\ne(tau) =", sign_e(TAU), " e(beta) =", sign_e(BETA))
for t in enumerate_ot(4):
    w = [weight_w(t, i) for i in range(1, 5)]
    values = {p or "root": str(node_value(t, p)[1]) for p in t.ramifications}
    print(f"{t.literal():24s} e={sign_e(t):+d}  w={w}  v={values}")

a, b = enumerate_ot(3)
print("\n", a, "+", b, "=", add_trees(a, b))

six = next(iter(all_six_tuples(4)))
tree, K, sigma = six_to_triple(six)
print("a 6-tuple and its triple:", six, "->", tree, repr(K), sigma)

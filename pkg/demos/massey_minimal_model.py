"""A DGL whose minimal model carries a nonzero ternary bracket.

Five degree-1 generators a, b, c, x, y and four degree-2 classes with
[a,b] = u = dx and [b,c] = v = dy.  Both brackets die in homology, but the
ternary bracket of the classes a, b, c survives: the Massey product.
"""

from linfty.algebra import check_linfty, check_lmorphism
from linfty.generators import massey_dgl
from linfty.graded import canonical_words
from linfty.transfer import transfer


def show(name, m, labels_in, labels_out):
    for word, vec in sorted(m.entries.items()):
        args = ", ".join(labels_in[i] for i in word)
        value = " + ".join(f"{c}*{labels_out[j]}" for j, c in sorted(vec.items()))
        print(f"  {name}({args}) = {value}")


dgl = massey_dgl()
hd, mm, f = transfer(dgl, max_arity=4)
H = mm.module
print("homology basis:", list(H.labels), "degrees", list(H.degrees))
print("splitting pivots:", hd.splitting.pivots)

for n in (2, 3, 4):
    print(f"mu_{n}:" + ("  (zero)" if mm.comp(n).is_zero() else ""))
    show(f"mu{n}", mm.comp(n), H.labels, H.labels)

print("transfer morphism, second component:")
show("f2", f.comp(2), H.labels, dgl.module.labels)

print("minimal model is L-infinity:", bool(check_linfty(mm, 4)))
print("f is an L-infinity morphism:", bool(check_lmorphism(f, "both", 4)))
print("exterior 3-words on H:", len(canonical_words(H.dim, H.degrees, 3, "exterior")))

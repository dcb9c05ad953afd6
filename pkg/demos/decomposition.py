"""Split a random DGL as the product of its minimal model and a linear contractible part.

The isomorphism phi: H x F -> L is built from the transfer morphism and the
inclusion of F; conjugating the structure of L by phi gives back the product
structure with no mixed terms.
"""

from linfty.coalgebra import compose_formal, identity_morphism
from linfty.generators import random_dgl
from linfty.transfer import decompose

for seed in range(5):
    dgl = random_dgl(seed)
    dec = decompose(dgl, max_arity=4)
    H, F = dec.hd.H, dec.hd.F
    two_sided = (compose_formal(dec.phi, dec.phi_inv) == identity_morphism(dec.phi.target, 4)
                 and compose_formal(dec.phi_inv, dec.phi) == identity_morphism(dec.phi.source, 4))
    higher = [n for n in (2, 3, 4) if not dec.minimal.comp(n).is_zero()]
    print(f"seed {seed}: dim L={dgl.module.dim} H={H.dim} F={F.dim}  nonzero mu_n for n in {higher}  "
          f"phi invertible: {two_sided}  conjugate = product: {dec.conjugated() == dec.product}")

"""Universal and semiuniversal deformations of the cubic vector field x^3 d/dy.

The fiber is the formal manifold with coordinates x (degree 0), y (degree 1)
and Q = x^3 d/dy.  Its tangent complex, truncated at polynomial degree 3, has
12 basis vector fields; the universal deformation lives over the whole
tangent complex, the semiuniversal one over its homology.
"""

from linfty.deformation import (base_change, is_trivial_candidate, semiuniversal_deformation,
                                tangent_complex, unidef_correspondence, universal_deformation,
                                same_perturbation)
from linfty.io import fixture_path, load

A, P = 4, 3
_, M = load(fixture_path("manifold_cubic"))
tc = tangent_complex(M, P)
print("tangent complex:", tc.module.dim, "vector fields")
for lab, deg in zip(tc.module.labels, tc.module.degrees):
    print(f"  {lab:16s} degree {deg}")

ud = universal_deformation(M, A, P, tc=tc)
print("\nuniversal deformation squares to zero:", ud.axiom_failure() is None)
F = unidef_correspondence(ud, tc=tc)
back = unidef_correspondence(morphism=F, base=ud.base, tc=tc, A=A)
print("it corresponds to the identity of U:", F.is_strict(), "and back:", same_perturbation(back, ud))

sd, f = semiuniversal_deformation(M, A, P, tc=tc)
print("\nsemiuniversal base dimension:", sd.base.space.dim, list(sd.base.space.labels))
print("squares to zero:", sd.axiom_failure() is None)
print("equals the pullback of the universal one along f:",
      same_perturbation(sd, base_change(ud, f, sd.base)))
print("triviality test on the universal deformation:", is_trivial_candidate(ud).status)

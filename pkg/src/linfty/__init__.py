"""Exact L-infinity algebra toolkit: minimal models of DGLs by tree sums,
L-infinity morphisms, and deformations of formal DG manifolds."""

from .algebra import (DGL, LInftyAlgebra, LInftyMorphism, PreconditionError, check_linfty,
                      check_lmorphism, obstruction_r)
from .coalgebra import Coderivation, Morphism, check_equivariance, compose_formal
from .deformation import (Deformation, FormalDGManifold, base_change, is_trivial_candidate,
                          semiuniversal_deformation, tangent_complex, unidef_correspondence,
                          universal_deformation)
from .graded import GradedModule
from .multimap import MultiMap
from .transfer import (build_splitting, contractible_factor, decompose, invert_formal, lift,
                       minimal_model, strictify, transfer, transfer_morphism)
from .trees import OrientedTree, enumerate_ot, parse_tree, sign_e

__version__ = "0.1.0"

__all__ = [
    "DGL", "LInftyAlgebra", "LInftyMorphism", "PreconditionError", "check_linfty", "check_lmorphism",
    "obstruction_r", "Coderivation", "Morphism", "check_equivariance", "compose_formal",
    "Deformation", "FormalDGManifold", "base_change", "is_trivial_candidate",
    "semiuniversal_deformation", "tangent_complex", "unidef_correspondence", "universal_deformation",
    "GradedModule", "MultiMap", "build_splitting", "contractible_factor", "decompose",
    "invert_formal", "lift", "minimal_model", "strictify", "transfer", "transfer_morphism",
    "OrientedTree", "enumerate_ot", "parse_tree", "sign_e",
]

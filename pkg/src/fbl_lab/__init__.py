"""Free complex Banach lattices over finite-dimensional spaces: norms, homomorphisms, spectra."""

__version__ = "0.1.0"

from .spaces import NormedSpace, RealifiedSpace, lp, space_from_spec  # noqa: E402
from .functionals import (ComplexFunctional, complexify, conjugate_functional,  # noqa: E402
                          one_weak_norm, realify)
from .lattice_expr import (Add, ComplexLatticeElem, Gen, Inf, LatticeExpr, Modulus, Scale,  # noqa: E402
                           Sup, canonical_positive_form, delta_embed, modulus_eval)
from .fbl_norm import (NormEstimate, complex_free_norm, dim1_complex_oracle,  # noqa: E402
                       p_free_norm, real_free_norm)
from .homs import InducedHom, apply_hom_subst, extend_operator, phi_map  # noqa: E402
from .spectra import SpectrumReport, cyclic_closure, gelfand_radius, matrix_spectrum  # noqa: E402
from .smooth import semi_inner_product, supporting_functional  # noqa: E402

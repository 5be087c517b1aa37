"""Exact computations for the contact Lie superalgebras K(n) acting on
weighted densities: invariant bilinear operators and first cohomology with
coefficients in differential operators."""

__version__ = "0.1.0"

from .grassmann import SuperPoly, parse_poly, format_poly, mul, d_x, eta, partial  # noqa: E402
from .contact import ContactField, contact_bracket, field, generators  # noqa: E402
from .densities import Density, SplitDensity, act_density, split_phi, unsplit_phi  # noqa: E402
from .diffops import DiffOp, BinaryDiffOp, parse_op, parse_binary, module_action  # noqa: E402
from .invariants import catalog, is_invariant, search_invariant, poisson  # noqa: E402
from .cohomology import Cochain1, H1Report, h1_dim, relative_h1_dim, delta0  # noqa: E402
from .cocycles import CocycleEntry, is_cocycle, is_coboundary, delta1_defect  # noqa: E402

"""Exact combinatorics of affine toric pairs: mld, quotients, automorphisms."""

from .automorphisms import (FanAutomorphism, OuterToricElement, OuterToricGroup, element_order,
                            fan_automorphisms, fixes_exceptional_torus, fixing_subtorus,
                            group_closure, jordan_report, max_order_table)
from .cones import (Cone, Fan, dual_cone, hilbert_basis, relint_contains, slice_lattice_points,
                    star_subdivision)
from .errors import (ToricError, LatticeError, NotSublattice, ZeroVector, NotInLattice,
                    DegenerateCone, UnboundedSlice, CapExceeded, NotInterior, NotPrimitive,
                    NotInCone, NotQGorenstein, NotKlt, LatticeMismatch, NotInUpstairsLattice,
                    OrderCapExceeded, OutOfRange, VerificationFailure)
from .lattice import (FiniteAbelianGroup, Lattice, dual_lattice, overlattice_quotient,
                      primitive_on_ray, smith_normal_form)
from .pairs import (ClassGroupPresentation, ToricPair, cartier_index, class_group, is_klt,
                    log_discrepancy, logdisc_functional, mld)
from .quotients import (TorusSubgroup, cyclic_quotient, invariant_monoid, log_quotient,
                        quotient_ld_check, quotient_tower)

__version__ = "0.1.0"

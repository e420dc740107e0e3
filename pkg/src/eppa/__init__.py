"""Finite-structure extension toolkit: structures, partial isomorphisms,
word groups, HL-extensions, coset covers, left systems, and coherent towers."""

from .errors import (CapExceeded, CoverVerificationError, EmbeddingFailure,
                     EppaError, InputError, SignatureMismatch, UnknownElement)
from .extensions import (CosetExtension, HLExtension, build_coset_extension,
                         canonical_cover, check_coherent, gamma_fragment,
                         is_minimal, verify_hl_extension)
from .groups import (FiniteQuotient, Perm, PermGroup, WordContext, close_group,
                     eval_partial_word, orbit, quotient_image,
                     stabilizer_generators, subgroup_image)
from .left_systems import (FiniteCosetSpec, FreeCosetSpec, GadgetBundle,
                           LeftSystem, encode_extension_conditions,
                           encode_no_translate, encode_nonmembership,
                           gadget_hom_exists, hl_separate, normalize_system,
                           solve_left_system, system_to_gadget)
from .partial_iso import (PartialIso, PartialIsoSet, compose_partial,
                          enumerate_partial_isos, invert_partial,
                          is_partial_iso)
from .search import find_coherent_extension, find_hl_extension
from .structures import (Factorization, Signature, Structure, StructureMap,
                         extends, find_homomorphism, free_amalgamation,
                         induced_substructure, is_gaifman_clique, is_T_free,
                         natural_factorization, validate_structure)
from .tower import TowerBudget, TowerResult, build_tower, chain_report

__all__ = [name for name in dir() if not name.startswith("_")]

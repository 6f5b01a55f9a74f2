"""Map-building algorithms: LC surjections, exact Devaney builds, gadgets."""

from .devaney import (DevaneyBuild, Round, canonical_json, exact_devaney,
                      exact_devaney_refine, leo_from_ct, map_digest)
from .lc import ConstructionError, lc_approx, surjective_lc
from .perturb import (MixingResult, PerturbationGadget, ShadowingResult,
                      break_chain_transitivity, key_claim_witness, mixing_perturbation,
                      random_chain, random_wiggle, robustness_samples,
                      shadowing_perturbation)

__all__ = [
    "ConstructionError", "DevaneyBuild", "MixingResult", "PerturbationGadget", "Round",
    "ShadowingResult", "break_chain_transitivity", "canonical_json", "exact_devaney",
    "exact_devaney_refine", "key_claim_witness", "lc_approx", "leo_from_ct", "map_digest",
    "mixing_perturbation", "random_chain", "random_wiggle", "robustness_samples",
    "shadowing_perturbation", "surjective_lc",
]

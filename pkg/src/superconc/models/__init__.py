from .basic import EquicorrelatedSampler, IIDSampler, dense_sampler
from .counterexamples import CEFieldA, CEFieldB, ce_a_sample, ce_b_sample
from .dgff import TorusDGFF, dgff_covariance, dgff_sampler
from .gue import GUESampler, gue_overlap, gue_sample, gue_top_eigpair
from .nk import NKModel, NKSampler, nk_fitness_table, nk_proximity
from .polymer import PolymerModel, polymer_coupled_run, polymer_ground_state, polymer_overlap
from .sk import MixedSKModel, sk_field
from .spec import parse_model_spec

__all__ = [
    "CEFieldA", "CEFieldB", "EquicorrelatedSampler", "GUESampler", "IIDSampler",
    "MixedSKModel", "NKModel", "NKSampler", "PolymerModel", "TorusDGFF",
    "ce_a_sample", "ce_b_sample", "dense_sampler", "dgff_covariance", "dgff_sampler",
    "gue_overlap", "gue_sample", "gue_top_eigpair", "nk_fitness_table", "nk_proximity",
    "parse_model_spec", "polymer_coupled_run", "polymer_ground_state", "polymer_overlap",
    "sk_field",
]

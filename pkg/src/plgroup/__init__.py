"""Thompson's groups F and T, an extension of F with solvable word problem,
and the commutator key exchange over it, in exact dyadic arithmetic.
"""

from .dyadic import Dyadic
from .plmap import (CircleMap, IntervalMap, LineMap, interpolate, phi, phi_inv,
                    phi_from_line, phi_to_line)
from .groupf import NormalForm, TreePair, generator_pair, is_identity, word_to_element
from .groupt import (TElement, derived_generators, free_generators, t_generators,
                     t_is_identity, t_word_to_element)
from .autf import AutFMap, act_on_f, beta_project, embed_f, hat_generators, lift, to_f
from .extension import (GElement, GroupContext, SAMPLE_PRESENTATION,
                        SourcePresentation, build_context, context_from_bundle)
from .aag import (Commitment, ExchangeParams, PrivateWord, PublicInstance, SharedKey,
                  commit, derive_key, instance_gen, kdf)
from .wire import Frame, Transcript, run_exchange, run_local_exchange

__version__ = "0.1.0"

__all__ = [
    "Dyadic",
    "IntervalMap", "LineMap", "CircleMap", "phi", "phi_inv",
    "phi_to_line", "phi_from_line", "interpolate",
    "TreePair", "NormalForm", "generator_pair", "word_to_element", "is_identity",
    "TElement", "t_generators", "t_word_to_element", "t_is_identity",
    "free_generators", "derived_generators",
    "AutFMap", "embed_f", "to_f", "act_on_f", "beta_project", "lift", "hat_generators",
    "GroupContext", "GElement", "SourcePresentation", "SAMPLE_PRESENTATION",
    "build_context", "context_from_bundle",
    "ExchangeParams", "PublicInstance", "PrivateWord", "Commitment", "SharedKey",
    "instance_gen", "commit", "derive_key", "kdf",
    "Frame", "Transcript", "run_exchange", "run_local_exchange",
    "__version__",
]

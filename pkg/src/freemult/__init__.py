"""Matrix systems with inner products on finitely generated free groups.

The package builds multiplicative vector-valued functions on the tree of a
free group from a finite matrix system, normalizes systems to
compatibility, decomposes them into irreducible summands, and transports
them across changes of free generators and across finite-index subgroups
(restriction and induction).
"""

from .changegen import (
    GeneratorMap,
    YFrontier,
    compute_Y,
    cone_included,
    intertwine_changegen,
    pruned_subtree,
    transport_system,
)
from .decompose import (
    closure_subsystem,
    decompose,
    find_proper_invariant,
    maximal_invariant,
    strip_null_directions,
)
from .errors import (
    FreemultError,
    InputError,
    InternalCheckError,
    NumericError,
    ResourceLimitError,
    ValidationError,
)
from .multfunc import (
    MultiplicativeFunction,
    act,
    evaluate,
    functions_close,
    inner_product,
    matrix_coefficient,
    norm2,
    norm_via_subtree,
    refine,
    shadow,
)
from .perron import (
    apply_transfer,
    normalize_to_compatible,
    pf_eigenpair,
    transfer_matrix,
)
from .subgroup import (
    CosetAutomaton,
    FundamentalSubtree,
    automaton_from_generators,
    complete_D,
    decompose_left,
    schreier_subtree,
)
from .system import (
    MatrixSystem,
    Subsystem,
    SystemMap,
    compatibility_defect,
    conjugate,
    direct_sum,
    invariance_defect,
    map_residual,
    quotient_system,
    restrict_to_subsystem,
)
from .transport import (
    coset_pairs,
    induce_function,
    induce_system,
    restrict_function,
    restrict_system,
    truncation_subtree,
)
from .words import Alphabet, FiniteSubtree, Word, kernel_backend

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "CosetAutomaton",
    "FiniteSubtree",
    "FreemultError",
    "FundamentalSubtree",
    "GeneratorMap",
    "InputError",
    "InternalCheckError",
    "MatrixSystem",
    "MultiplicativeFunction",
    "NumericError",
    "ResourceLimitError",
    "SystemMap",
    "ValidationError",
    "Word",
    "YFrontier",
    "Subsystem",
    "act",
    "apply_transfer",
    "automaton_from_generators",
    "closure_subsystem",
    "compatibility_defect",
    "complete_D",
    "compute_Y",
    "cone_included",
    "conjugate",
    "coset_pairs",
    "decompose",
    "decompose_left",
    "direct_sum",
    "evaluate",
    "find_proper_invariant",
    "functions_close",
    "induce_function",
    "induce_system",
    "inner_product",
    "intertwine_changegen",
    "invariance_defect",
    "kernel_backend",
    "map_residual",
    "matrix_coefficient",
    "maximal_invariant",
    "norm2",
    "norm_via_subtree",
    "normalize_to_compatible",
    "pf_eigenpair",
    "pruned_subtree",
    "quotient_system",
    "refine",
    "restrict_function",
    "restrict_system",
    "restrict_to_subsystem",
    "schreier_subtree",
    "shadow",
    "strip_null_directions",
    "transfer_matrix",
    "transport_system",
    "truncation_subtree",
]

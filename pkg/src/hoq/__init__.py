"""Higher-order logic over finite structures.

Parse and type-check formulas, rewrite them into normal forms, evaluate
them (with transitive-closure and fixed-point operators) on explicit
finite structures, encode relations as bit strings and reduce the order
of a formula at the cost of an exponentially larger structure.
"""

from .check import FragmentReport, TypeCheckError, alpha_rename, classify, typecheck
from .encoder import BitCode, CountReport, counts, decode, encode, enumerate_relations
from .errors import (
    CodeTooLong,
    HoqError,
    LimitExceeded,
    NormalizationError,
    SearchSpaceTooLarge,
    StructureError,
    TargetTooLarge,
    UnsupportedNode,
)
from .evaluator import Evaluator, evaluate
from .limits import Limits
from .normalize import best_pnf, normalize, pipeline, to_anf, to_dnf, to_pnf, to_snf
from .oracle import enumerate_structures, equivalent, strategy_apfp
from .parser import ParseError, load_structure, parse_formula, print_formula
from .reduction import check_reduction, plan, reduce_formula, reduce_structure
from .structures import Structure
from .types import IOTA, TypeExpr, parse_type

"""Terms, formulas, structures, definable functions and exact linear witness search."""

from cohult.logic.definable import (
    DefinableFunction,
    DefinableSetDescriptor,
    Fragment,
    NotTotal,
    SkolemVerdict,
    atomic_formulas,
    definable_set,
    domain_elements,
    enumerate_terms,
    has_definable_skolem,
    input_name,
    is_qf_embedding,
)
from cohult.logic.fm import (
    Affine,
    LinearConstraint,
    LinearConstraintSystem,
    NotLinear,
    Unsat,
    Witness,
    dnf,
    find_witness,
    fm_solve,
    grid_oracle,
    linearize,
)
from cohult.logic.io import dump_structure, dumps_structure, load_structure, loads_structure
from cohult.logic.structures import (
    ZERO,
    FiniteStructure,
    OrderedVectorSpace,
    QuantifierInSymbolic,
    Structure,
    UnboundVariable,
    UnknownSymbol,
    Vec,
    Vocabulary,
    element_pool,
    eval_formula,
    eval_term,
)
from cohult.logic.syntax import (
    And,
    App,
    Atom,
    Const,
    Exists,
    Not,
    Or,
    ParseError,
    Scale,
    Var,
    depth,
    free_vars,
    is_quantifier_free,
    parse_formula,
    parse_term,
    subformulas,
    substitute,
)

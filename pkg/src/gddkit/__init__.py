"""Generalized Dynkin diagrams of diagonal braidings: arithmetic and quasi-affine classification."""

from .labels import GENERIC, Finite, Label, LabelError, ParamOrder, parse_label, parse_order
from .gdd import GDD, GDDError, Shape, ShapeKind, new_gdd
from .cartan import CartanMatrix, GcmClass, GcmKind, Prop51, cartan_type, classify_gcm, prop_a51
from .chains import (
    ChainClass,
    ChainVerdict,
    Head,
    classify_classical,
    continue_on,
    is_classical,
    is_quasi_classical,
    is_semi_classical,
    is_simple_chain,
    make_simple_chain,
)
from .weyl import DEFAULT_CAPS, Caps, Outcome, WeylVerdict, arithmetic_verdict, is_arithmetic, reflect
from .filters import FilterOutcome, FilterVerdict, filter_bank, first_rejection
from .constraints import Constraint, ConstraintError, parse_constraint
from .catalog import CatalogEntry
from .engine import (
    DiffReport,
    EnumerationResult,
    QaVerdict,
    Universe,
    UniverseTooLarge,
    enumerate_quasi_affine,
    is_quasi_affine,
    match_catalog,
    match_concrete,
)
from .fileformat import Entry, GddFile, GddSyntaxError, parse_gdd_file, print_gdd_file

__version__ = "0.1.0"

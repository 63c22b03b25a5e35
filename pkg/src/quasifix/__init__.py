"""Exact computation with growing substitutions.

Quasi-fixed points z = T^c(phi^m(z)) of a substitution, their enumeration and
certification, window desubstitution and digit streams, two-sided kernel
automata, base-k rational addresses, higher block presentations, and factor
maps in local normal form.  All arithmetic is exact.
"""

from .blocks import (
    AutomaticHandle,
    BlockPresentation,
    SlidingBlockCode,
    block_substitution,
    certify_fiber_qfp,
    fiber_windows,
    iota,
    minimal_subsystems,
    parse_factor_map,
    push_qfp,
    verify_block_laws,
)
from .desub import (
    DesubStep,
    Detection,
    desub_digits,
    desubstitute_window,
    detect_qfp,
    disjoint_factorization_count,
    fiber_size_bound,
)
from .kadic import DigitExpansion, KAdicRational, kappa
from .kernel import (
    KernelAutomaton,
    build_kernel_automaton,
    column_constant_power,
    column_maps,
    equal_sequences,
    export_dfao,
    kernel_size,
    parse_dfao,
)
from .language import LanguageTable, contains, language, language_table, letter_language, pair_language
from .morphisms import (
    Analysis,
    Coding,
    Substitution,
    ambi_idempotent_exponent,
    analyze,
    load_substitution,
    parse_substitution,
)
from .onesided import OneSidedQfp, interpretation_count, onesided_desub, prolong_two_sided
from .qfp import (
    Qfp,
    QfpSeed,
    dedup,
    enumerate_seeds,
    format_seed,
    identify,
    is_equal,
    materialize,
    minimal_period,
    parse_seed,
    relation_offset,
    shift,
    substitute,
    verify,
)
from .words import Alphabet, NotGrowingError, ParseError, UndeterminedError, Window

__version__ = "0.1.0"

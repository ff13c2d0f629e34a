"""weldkit: welded links as Gauss diagrams.

Move calculus and sorting, Wirtinger presentations and peripheral systems,
Milnor invariants through the repetition-free Magnus expansion, and
refutation/certification of reduced-peripheral-system equivalence.
"""

__version__ = "0.1.0"

from .diagram import (
    Arrow,
    BraidWord,
    DiagramError,
    End,
    GaussCodeError,
    GaussDiagram,
    canonical_key,
    diagram_from_json,
    diagram_to_json,
    from_braid_closure,
    is_sorted,
    parse_braid_word,
    parse_gauss_code,
    serialize_gauss_code,
)
from .equivalence import (
    Bounds,
    Certificate,
    CertificateError,
    Verdict,
    Witness,
    WordMove,
    diagram_orbit_connected,
    perturb_system,
    refute,
    search_certificate,
    sv_equivalent,
    verify_certificate,
)
from .group import (
    GroupPresentation,
    PeripheralSystem,
    Word,
    abelianization,
    build_sorted_from_longitudes,
    free_reduce,
    format_word,
    mu_system,
    parse_word,
    peripheral_system,
    reduced_presentation,
    smith_normal_form,
    sorted_longitudes,
    wirtinger,
    word_commutator,
    word_conjugate,
    word_inverse,
    word_mul,
    word_pow,
)
from .invariants import arc_expansions, diagram_table, linking_matrix, longitude_expansions
from .magnus import (
    MilnorTable,
    ReducedPoly,
    TableEntry,
    expand,
    inv,
    milnor_table,
    mul,
    rf_equal,
    rf_trivial,
    tables_equal,
)
from .moves import (
    MoveError,
    MoveInstance,
    MoveTrace,
    SlideSite,
    TraceStep,
    apply_move,
    apply_slide,
    apply_tah,
    check_trace,
    enumerate_moves,
    invert_instance,
    sort_diagram,
    verify_trace,
)

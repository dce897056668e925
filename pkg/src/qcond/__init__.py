"""Matrix-based quantum conditional and mutual entropies."""
from .entcalc import (
    BoundsReport,
    ConditionalAmplitude,
    EntropyDiagram,
    Partition,
    TernaryDiagram,
    bipartite_diagram,
    check_bounds,
    classical_conditional_entropy,
    classical_mutual_entropy,
    conditional_amplitude,
    conditional_entropy,
    entanglement_witness,
    entropy_via_operator,
    mutual_amplitude,
    mutual_entropy,
    shannon_entropy,
    subsystem_entropy,
    ternary_diagram,
    ternary_mutual_entropy,
    trotter_sequence,
    von_neumann_entropy,
)
from .qstate import (
    DensityMatrix,
    SystemShape,
    bell_state,
    classical_mixture,
    from_pure,
    ghz_state,
    load_state,
    product_state,
    random_mixed,
    random_separable,
    reduce,
    save_state,
    singlet,
)

__version__ = "0.1.0"

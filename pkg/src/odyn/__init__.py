"""Open graphic dynamics: clocked, graph-motored state dynamics, their
interactions, and the open dynamics a family of them generates."""

from ._ids import Assignment, render, sorted_ids
from .dynamics import (
    Clock,
    Dynamics,
    Dynamorphism,
    ScannedDynamics,
    canonical_essential_scansion,
    enumerate_realizations,
    enumerate_scanned_realizations,
    essential_clock,
    is_clock,
    is_realization,
    state_type,
    succeeds,
    validate_dynamorphism,
    validate_scanned_dynamorphism,
)
from .family_gen import (
    DynamicFamily,
    HeapFamily,
    Synchronization,
    family_connective_structure,
    flexible_heaps,
    functional_heaps,
    generate,
    heap_equivalence,
    make_interaction,
    primo_generated,
    validate_family,
    validate_interaction,
)
from .graph_core import Graph, GraphMorphism, identity_morphism, validate_graph, validate_graph_morphism
from .multirel import (
    BinaryMultipleRelation,
    MultipleRelation,
    PartialFamily,
    connective_structure,
    constant_relation,
    is_compatible,
    is_splittable,
    join,
    rb_image,
    rb_preimage,
    rd,
    restrict,
    rm,
    tensor,
)
from .odf import parse_family, parse_open_dynamics, serialize_open_dynamics
from .open_dyn import (
    MultiDynamics,
    OpenDynamics,
    OpenRealization,
    ParamEquivalence,
    enumerate_open_realizations,
    parametric_quotient,
    passes_then,
    passes_through,
    validate_multi_dynamorphism,
    validate_open,
)
from .transitions import Transition, TransitionFamily, classify, compose, compose_family, image, pointwise_subset

__version__ = "0.1.0"

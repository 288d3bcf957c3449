"""Interactions, dynamic families, and the open dynamics a family generates.

The primo-generated dynamic has product states over the family index, one
parameter per exit tuple of the interaction, and the synchronizer's motor,
clock and dates. The functionally, flexibly and mono-generated dynamics are
parametric quotients of it, obtained from a choice of parameter heaps.
"""

from dataclasses import dataclass, field
from itertools import product
from types import MappingProxyType

from ._ids import render, sort_key, sorted_ids
from .dynamics import dynamorphism_diagnostics
from .graph_core import GraphMorphism, identity_morphism, validate_graph_morphism
from .multirel import (
    BinaryMultipleRelation,
    connective_structure,
    rb_image,
    rb_preimage,
)
from .open_dyn import (
    MultiDynamics,
    OpenDynamics,
    ParamEquivalence,
    enumerate_open_realizations,
    is_open_realization,
    OpenRealization,
    parametric_quotient,
    passes_then,
    validate_open,
)
from .transitions import Determinism, Transition, classify

MODES = ("p", "f", "s", "m")
DEFAULT_HEAP_BUDGET = 10_000_000


class InvalidFamily(ValueError):
    pass


class HeapBudgetExceeded(RuntimeError):
    pass


def realization_sets(A: OpenDynamics) -> dict:
    """``param -> set of external parts`` for an open dynamics."""
    out = {mu: set() for mu in A.params}
    for r in enumerate_open_realizations(A):
        out[r.param].add(r.assignment)
    return {mu: frozenset(xs) for mu, xs in out.items()}


def make_interaction(components, tuples) -> BinaryMultipleRelation:
    """Build an interaction from ``{i: (assignment, param)}`` tuples.

    Entry contexts are the components' realization sets, exit contexts their
    parameter sets.
    """
    in_ctx, out_ctx = {}, {}
    for i, A in components.items():
        in_ctx[i] = frozenset().union(*realization_sets(A).values())
        out_ctx[i] = A.params
    return BinaryMultipleRelation(in_ctx, out_ctx, tuples)


def validate_interaction(components, R: BinaryMultipleRelation) -> list:
    diags = []
    if not R.graph:
        diags.append("empty-interaction")
    if R.index != frozenset(components):
        diags.append("index-mismatch")
        return diags
    for n, t in enumerate(R.sorted_graph()):
        for i, (x, lam) in sorted(t, key=lambda kv: sort_key(kv[0])):
            if not is_open_realization(components[i], OpenRealization(lam, x)):
                diags.append(f"incoherence at slot {render(i)} of tuple {n}: "
                             f"{render(x)} is not a realization for {render(lam)}")
    return diags


@dataclass(frozen=True, eq=False)
class Synchronization:
    """A deterministic clock dynamorphism from the synchronizer's clock to a component's clock."""

    graph_part: GraphMorphism
    instant_map: MappingProxyType

    def __init__(self, graph_part, instant_map):
        object.__setattr__(self, "graph_part", graph_part)
        object.__setattr__(self, "instant_map", MappingProxyType(dict(instant_map)))

    def components(self, h_src, h_tgt):
        return {
            v: Transition(h_src.state_sets[v], h_tgt.state_sets[self.graph_part.vertex_map[v]],
                          {t: {self.instant_map[t]} for t in h_src.state_sets[v] if t in self.instant_map})
            for v in h_src.motor.vertices
        }


@dataclass(frozen=True, eq=False)
class DynamicFamily:
    index: frozenset
    sync: object
    components: MappingProxyType
    interaction: BinaryMultipleRelation
    synchronizations: MappingProxyType = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "index", frozenset(self.index))
        object.__setattr__(self, "components", MappingProxyType(dict(self.components)))
        object.__setattr__(self, "synchronizations", MappingProxyType(dict(self.synchronizations)))

    def sorted_index(self):
        return sorted_ids(self.index)

    def sync_of(self, i) -> Synchronization:
        if i == self.sync:
            h = self.components[i].clock
            return Synchronization(identity_morphism(h.motor), {t: t for t in h.states()})
        return self.synchronizations[i]


def validate_family(F: DynamicFamily) -> list:
    diags = []
    if not F.index:
        return ["empty-index"]
    if F.sync not in F.index:
        diags.append("synchronizer-not-in-index")
    if set(F.components) != set(F.index):
        diags.append("components-do-not-cover-index")
        return diags
    for i in F.sorted_index():
        diags += [f"component {render(i)}: {m}" for m in validate_open(F.components[i])]
    if diags:
        return diags
    h0 = F.components[F.sync].clock
    for i in F.sorted_index():
        if i == F.sync:
            continue
        s = F.synchronizations.get(i)
        if s is None:
            diags.append(f"missing-synchronization {render(i)}")
            continue
        hi = F.components[i].clock
        gm = s.graph_part
        if gm.source != h0.motor or gm.target != hi.motor:
            diags.append(f"synchronization {render(i)}: motor-mismatch")
            continue
        bad = validate_graph_morphism(gm)
        if bad:
            diags += [f"synchronization {render(i)}: {m}" for m in bad]
            continue
        comps = s.components(h0, hi)
        for v in sorted_ids(comps):
            if classify(comps[v]) is not Determinism.DETERMINISTIC:
                diags.append(f"synchronization {render(i)}: not-deterministic at {render(v)}")
        diags += [f"synchronization {render(i)}: {m}" for m in dynamorphism_diagnostics(gm, comps, h0, hi)]
    R = F.interaction
    if R.index != F.index:
        diags.append("interaction-index-mismatch")
        return diags
    for i in F.sorted_index():
        A = F.components[i]
        if R.out_contexts[i] != A.params:
            diags.append(f"interaction exit context {render(i)} differs from the parameters")
        expected = frozenset().union(*realization_sets(A).values())
        if R.in_contexts[i] != expected:
            diags.append(f"interaction entry context {render(i)} differs from the realizations")
    diags += validate_interaction(F.components, R)
    return diags


def _require_valid(F):
    diags = validate_family(F)
    if diags:
        raise InvalidFamily("; ".join(diags))


def param_tuple(order, tup):
    d = dict(tup)
    return tuple(d[i] for i in order)


def generated_params(F: DynamicFamily) -> list:
    """``M = Im(rb(R))`` as parameter tuples in index order."""
    order = F.sorted_index()
    return sorted_ids(param_tuple(order, mu) for mu in rb_image(F.interaction))


def primo_generated(F: DynamicFamily, strict_edge=False, validate=True) -> OpenDynamics:
    """The primo-generated open dynamics ``[F]_p``.

    States at vertex S are tuples indexed by the sorted family index, dated by
    their synchronizer coordinate. With `strict_edge`, succession inside each
    component must follow the image of the generating edge rather than any
    clock edge.
    """
    if validate:
        _require_valid(F)
    order = F.sorted_index()
    A0 = F.components[F.sync]
    h0 = A0.clock
    motor = A0.motor
    syncs = {i: F.sync_of(i) for i in order}

    states = {}
    for S in motor.vertices:
        factors = []
        for i in order:
            A = F.components[i]
            factors.append(sorted_ids(A.multi.state_sets[syncs[i].graph_part.vertex_map[S]]))
        k0 = order.index(F.sync)
        keep = []
        for a in product(*factors):
            t0 = A0.datation[a[k0]]
            if all(F.components[i].datation[a[k]] == syncs[i].instant_map[t0] for k, i in enumerate(order)):
                keep.append(a)
        states[S] = frozenset(keep)

    params = generated_params(F)
    if not params:
        raise InvalidFamily("the interaction has an empty image")
    trans = {}
    k0 = order.index(F.sync)
    for e in motor.edge_list:
        src, tgt = states[e.dom], states[e.cod]
        edges = {i: syncs[i].graph_part.edge_map[e.id] for i in order} if strict_edge else {}
        for mu in params:
            mu_d = dict(zip(order, mu))
            img = {a: set() for a in src}
            for pre in rb_preimage(F.interaction, zip(order, mu)):
                xs = dict(pre)

                def hit(a):
                    return all(xs[i].get(F.components[i].datation[a[k]]) == a[k] for k, i in enumerate(order))

                passed_src = [a for a in src if hit(a)]
                passed_tgt = [b for b in tgt if hit(b)]
                for a in passed_src:
                    want = h0.step(e.id, A0.datation[a[k0]])
                    for b in passed_tgt:
                        if A0.datation[b[k0]] != want:
                            continue
                        if all(passes_then(F.components[i], OpenRealization(mu_d[i], xs[i]), a[k], b[k],
                                           edges.get(i))
                               for k, i in enumerate(order)):
                            img[a].add(b)
            trans[(e.id, mu)] = img
    dates = {a: A0.datation[a[k0]] for ss in states.values() for a in ss}
    return OpenDynamics(MultiDynamics(motor, params, states, trans), h0, dates)


@dataclass(frozen=True, eq=False)
class HeapFamily:
    """Per-component parameter heaps, keyed by family index."""

    sets: MappingProxyType

    def __init__(self, sets):
        object.__setattr__(self, "sets", MappingProxyType({i: frozenset(v) for i, v in dict(sets).items()}))

    def __getitem__(self, i):
        return self.sets[i]

    def __eq__(self, other):
        if not isinstance(other, HeapFamily):
            return NotImplemented
        return dict(self.sets) == dict(other.sets)

    __hash__ = None

    def __repr__(self):
        return "HeapFamily(" + ", ".join(f"{render(i)}: {render(self.sets[i])}" for i in sorted_ids(self.sets)) + ")"


def heap_equivalence(M, N: HeapFamily, order=None) -> ParamEquivalence:
    """Partition parameter tuples: coordinates equal, or both in that coordinate's heap.

    `order` gives the family index for the tuple positions (sorted index by default).
    """
    order = list(order) if order is not None else sorted_ids(N.sets)
    groups = {}
    for mu in M:
        key = tuple((0,) if mu[k] in N[i] else (1, mu[k]) for k, i in enumerate(order))
        groups.setdefault(key, set()).add(mu)
    return ParamEquivalence(frozenset(frozenset(g) for g in groups.values()))


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0

    def spend(self, n=1):
        self.used += n
        if self.limit is not None and self.used > self.limit:
            raise HeapBudgetExceeded(f"heap computation exceeded its budget of {self.limit} checks")


def _split(t, k):
    """(entry_k, exit_k, other entries, other exits) of an interaction tuple."""
    d = dict(t)
    a_k, l_k = d[k]
    others = sorted((i for i in d if i != k), key=sort_key)
    return a_k, l_k, tuple(d[i][0] for i in others), tuple(d[i][1] for i in others)


def compatible_params(R: BinaryMultipleRelation, k) -> frozenset:
    return frozenset(dict(t)[k][1] for t in R.graph)


def functional_heaps(F: DynamicFamily, budget=DEFAULT_HEAP_BUDGET) -> HeapFamily:
    """Parameters of each component determined by the other components' realizations.

    ``l`` is in the heap of k when it is R-compatible and every family of
    other-component realizations compatible with l is compatible with no other
    value of k's parameter.
    """
    R = F.interaction
    spend = _Budget(budget).spend
    heaps = {}
    for k in F.sorted_index():
        # entries of the other slots -> exit values of slot k they are compatible with
        seen = {}
        for t in R.graph:
            spend()
            _, l_k, others_in, _ = _split(t, k)
            seen.setdefault(others_in, set()).add(l_k)
        heaps[k] = frozenset(
            l for l in compatible_params(R, k)
            if all(vals == {l} for vals in seen.values() if l in vals)
        )
    return HeapFamily(heaps)


def free_params(F: DynamicFamily, k, budget=DEFAULT_HEAP_BUDGET) -> frozenset:
    """R-compatible values of k's parameter that are free (not blocked)."""
    R = F.interaction
    spend = _Budget(budget).spend
    split = [_split(t, k) for t in R.graph]
    full = {(a, l, oi, oo) for a, l, oi, oo in split}
    by_other_exits = {}
    for _, _, oi, oo in split:
        by_other_exits.setdefault(oo, set()).add(oi)
    free = set()
    for lam in compatible_params(R, k):
        ok = True
        for a_k, l_k, _, mu in split:
            if l_k != lam:
                continue
            for b in by_other_exits[mu]:
                spend()
                if (a_k, lam, b, mu) not in full:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            free.add(lam)
    return frozenset(free)


def flexible_heaps(F: DynamicFamily, budget=DEFAULT_HEAP_BUDGET) -> HeapFamily:
    """Blocked parameters: R-compatible values that are not free."""
    R = F.interaction
    return HeapFamily({k: compatible_params(R, k) - free_params(F, k, budget) for k in F.sorted_index()})


def generate(F: DynamicFamily, mode, strict_edge=False, budget=DEFAULT_HEAP_BUDGET) -> OpenDynamics:
    if mode not in MODES:
        raise ValueError(f"unknown generation mode {mode!r}")
    P = primo_generated(F, strict_edge)
    if mode == "p":
        return P
    if mode == "m":
        return parametric_quotient(P, ParamEquivalence.total(P.params))
    heaps = functional_heaps(F, budget) if mode == "f" else flexible_heaps(F, budget)
    return parametric_quotient(P, heap_equivalence(P.params, heaps, F.sorted_index()))


def family_connective_structure(F: DynamicFamily, include_empty=False) -> list:
    return connective_structure(F.interaction, include_empty)

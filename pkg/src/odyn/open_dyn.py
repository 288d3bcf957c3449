"""Multi-dynamics, open dynamics, their realizations and parametric quotients."""

from dataclasses import dataclass
from types import MappingProxyType

from ._ids import Assignment, render, sort_key, sorted_ids
from .dynamics import (
    Clock,
    Dynamics,
    ScannedDynamics,
    UnknownState,
    dynamorphism_diagnostics,
    enumerate_scanned_realizations,
    is_scanned_realization,
    is_clock,
    state_type,
    succeeds,
    validate_dynamics,
)
from .graph_core import Graph
from .transitions import Transition


class InvalidOpenDynamics(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MultiDynamics:
    """Dynamics indexed by parameters, sharing one state set per vertex.

    `edge_trans` is keyed by ``(edge_id, param)``; absent keys are all-empty
    transitions.
    """

    motor: Graph
    params: frozenset
    state_sets: MappingProxyType
    edge_trans: MappingProxyType

    def __init__(self, motor, params, state_sets, edge_trans=None):
        params = frozenset(params)
        if not params:
            raise InvalidOpenDynamics("a multi-dynamics needs at least one parameter")
        base = Dynamics(motor, state_sets)
        given = dict(edge_trans or {})
        trans = {}
        for e in motor.edge_list:
            src, tgt = base.state_sets[e.dom], base.state_sets[e.cod]
            for mu in params:
                t = given.pop((e.id, mu), None)
                if t is None:
                    t = Transition(src, tgt)
                elif not isinstance(t, Transition):
                    t = Transition(src, tgt, t)
                trans[(e.id, mu)] = t
        if given:
            raise InvalidOpenDynamics(f"transitions for unknown (edge, param) keys {sorted(map(str, given))}")
        object.__setattr__(self, "motor", motor)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "state_sets", base.state_sets)
        object.__setattr__(self, "edge_trans", MappingProxyType(trans))
        object.__setattr__(self, "_base", base)

    def __eq__(self, other):
        if not isinstance(other, MultiDynamics):
            return NotImplemented
        return (self.motor == other.motor and self.params == other.params
                and dict(self.state_sets) == dict(other.state_sets)
                and dict(self.edge_trans) == dict(other.edge_trans))

    __hash__ = None

    def states(self):
        return self._base.states()

    def type_of(self, s):
        return state_type(self._base, s)

    def sorted_params(self):
        return sorted_ids(self.params)

    def slice(self, mu) -> Dynamics:
        if mu not in self.params:
            raise KeyError(mu)
        return Dynamics(self.motor, self.state_sets,
                        {e.id: self.edge_trans[(e.id, mu)] for e in self.motor.edge_list})

    def lookup(self, mu):
        """Edge-transition lookup for one parameter, without building the slice."""
        return lambda eid: self.edge_trans[(eid, mu)]


@dataclass(frozen=True, eq=False)
class OpenDynamics:
    """A scanned multi-dynamics: parameters, a clock and a date for every state."""

    multi: MultiDynamics
    clock: Clock
    datation: MappingProxyType

    def __init__(self, multi, clock, datation):
        object.__setattr__(self, "multi", multi)
        object.__setattr__(self, "clock", clock)
        object.__setattr__(self, "datation", MappingProxyType(dict(datation)))

    @classmethod
    def build(cls, motor, clock, params, states, trans, dates):
        """`trans` maps ``(edge, param)`` to a dict ``state -> iterable of states``."""
        return cls(MultiDynamics(motor, params, states, trans), clock, dates)

    def __eq__(self, other):
        if not isinstance(other, OpenDynamics):
            return NotImplemented
        return (self.multi == other.multi and self.clock == other.clock
                and dict(self.datation) == dict(other.datation))

    __hash__ = None

    @property
    def motor(self):
        return self.multi.motor

    @property
    def params(self):
        return self.multi.params

    def states(self):
        return self.multi.states()

    def date(self, s):
        if s not in self.datation:
            raise UnknownState(s)
        return self.datation[s]

    def trans(self, eid, mu) -> Transition:
        return self.multi.edge_trans[(eid, mu)]

    def scanned(self, mu) -> ScannedDynamics:
        return ScannedDynamics(self.multi.slice(mu), self.clock, self.datation)


def validate_open(A: OpenDynamics) -> list:
    """Structural checks, then the datation law ``τ(b) = e^h(τ(a))`` for every step.

    For a total datation the law is the same as every parameter slice being
    scanned by it, so it is checked directly. A state whose date has the wrong
    vertex type is reported on its own only when no law violation names it.
    """
    diags = [f"multi: {m}" for m in validate_dynamics(A.multi._base)]
    if A.motor != A.clock.motor:
        diags.append("motor-mismatch")
    if not is_clock(A.clock):
        diags.append("clock-not-deterministic")
    if diags:
        return diags
    misplaced = set()
    for v in A.motor.sorted_vertices():
        for s in sorted_ids(A.multi.state_sets[v]):
            if s not in A.datation:
                diags.append(f"undated-state {render(s)}")
            elif A.datation[s] not in A.clock.state_sets[v]:
                misplaced.add(s)
    if diags:
        return diags
    named = set()
    for e in A.motor.edge_list:
        for mu in A.multi.sorted_params():
            t = A.trans(e.id, mu)
            for a in sorted_ids(t.source):
                if a in misplaced:
                    continue
                expected = A.clock.step(e.id, A.datation[a])
                for b in sorted_ids(t.map[a]):
                    if A.datation[b] != expected:
                        named.add(b)
                        diags.append(f"datation-law violation at ({e.id},{render(mu)},{render(a)},{render(b)})")
    diags += [f"date-type-mismatch {render(s)}" for s in sorted_ids(misplaced - named)]
    return diags


@dataclass(frozen=True)
class ParamEquivalence:
    classes: frozenset

    def __post_init__(self):
        classes = frozenset(frozenset(c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        seen = set()
        for c in classes:
            if not c:
                raise InvalidOpenDynamics("empty equivalence class")
            if c & seen:
                raise InvalidOpenDynamics("equivalence classes overlap")
            seen |= c

    @classmethod
    def discrete(cls, params):
        return cls(frozenset(frozenset({p}) for p in params))

    @classmethod
    def total(cls, params):
        return cls(frozenset({frozenset(params)}))

    @property
    def members(self):
        return frozenset().union(*self.classes)

    @staticmethod
    def label(cls_members):
        return "~" + render(min(cls_members, key=sort_key))

    def class_of(self, mu):
        for c in self.classes:
            if mu in c:
                return c
        raise KeyError(mu)

    def label_of(self, mu):
        return self.label(self.class_of(mu))

    def labelled(self):
        return {self.label(c): c for c in self.classes}

    def sorted_classes(self):
        return sorted(self.classes, key=lambda c: sort_key(min(c, key=sort_key)))


def parametric_quotient(A: OpenDynamics, q: ParamEquivalence) -> OpenDynamics:
    """Same motor, clock, states and dates; each class transition is the union of its members'."""
    if q.members != A.params:
        raise InvalidOpenDynamics("equivalence does not partition the parameter set")
    trans = {}
    for label, members in q.labelled().items():
        for e in A.motor.edge_list:
            src = A.multi.state_sets[e.dom]
            trans[(e.id, label)] = {
                a: frozenset().union(*(A.trans(e.id, mu).map[a] for mu in members)) for a in src
            }
    multi = MultiDynamics(A.motor, q.labelled(), A.multi.state_sets, trans)
    return OpenDynamics(multi, A.clock, A.datation)


@dataclass(frozen=True)
class OpenRealization:
    """A parameter value together with the external part of a realization."""

    param: object
    assignment: Assignment

    def order_key(self):
        return (sort_key(self.param), self.assignment.order_key())

    def __repr__(self):
        return f"({render(self.param)},{render(self.assignment)})"


def param_realizations(A: OpenDynamics, mu) -> list:
    return enumerate_scanned_realizations(
        ScannedDynamics(A.multi._base, A.clock, A.datation), A.multi.lookup(mu))


def enumerate_open_realizations(A: OpenDynamics) -> list:
    return [OpenRealization(mu, x) for mu in A.multi.sorted_params() for x in param_realizations(A, mu)]


def is_open_realization(A: OpenDynamics, r: OpenRealization) -> bool:
    if r.param not in A.params:
        return False
    return is_scanned_realization(ScannedDynamics(A.multi._base, A.clock, A.datation),
                                  r.assignment, A.multi.lookup(r.param))


def _assignment(r):
    return r.assignment if isinstance(r, OpenRealization) else r


def passes_through(A: OpenDynamics, r, s) -> bool:
    """``𝔞 ▷ s``: the realization takes value s at the date of s."""
    return _assignment(r).get(A.date(s)) == s


def passes_then(A: OpenDynamics, r, s1, s2, edge=None) -> bool:
    """``𝔞 ▷ s1, s2``: passes through s1, then through s2 at a succeeding date.

    Without `edge`, any clock edge may witness the succession; with `edge`,
    that specific edge must send the date of s1 to the date of s2.
    """
    t1, t2 = A.date(s1), A.date(s2)
    if edge is None:
        linked = succeeds(A.clock, t1, t2)
    else:
        e = A.motor.edge(edge)
        linked = state_type(A.clock, t1) == e.dom and A.clock.step(edge, t1) == t2
    return linked and passes_through(A, r, s1) and passes_through(A, r, s2)


def validate_multi_dynamorphism(t3, A, B) -> list:
    """Validate ``(θ, Δ, δ)``: for every λ, (Δ, δ) is a dynamorphism ``A_λ -> B_θ(λ)``."""
    theta, graph_part, delta = t3
    A = A.multi if isinstance(A, OpenDynamics) else A
    B = B.multi if isinstance(B, OpenDynamics) else B
    diags = []
    for lam in A.sorted_params():
        if lam not in theta:
            diags.append(f"theta-undefined {render(lam)}")
            continue
        if theta[lam] not in B.params:
            diags.append(f"theta-image-missing {render(lam)}")
            continue
        for m in dynamorphism_diagnostics(graph_part, delta, A.slice(lam), B._base, B.lookup(theta[lam])):
            diags.append(f"param {render(lam)}: {m}")
    return diags

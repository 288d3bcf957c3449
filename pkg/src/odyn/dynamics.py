"""Mono graphic dynamics, clocks, dynamorphisms, scanned dynamics and their realizations."""

from dataclasses import dataclass
from types import MappingProxyType

from ._ids import Assignment, render, sorted_ids
from .graph_core import Graph, GraphMorphism, identity_morphism, validate_graph, validate_graph_morphism
from .transitions import Determinism, Transition, classify, compose, pointwise_subset


class InvalidDynamics(ValueError):
    pass


class UnknownState(KeyError):
    pass


class MotorMismatch(ValueError):
    pass


ESSENTIAL_SUFFIX = "•"


@dataclass(frozen=True, eq=False)
class Dynamics:
    """A graph morphism from a motor into sets and transitions.

    `state_sets` maps each vertex to its states; `edge_trans` maps each edge id
    to a transition from the states of its domain to those of its codomain.
    Missing edge entries mean the all-empty transition.
    """

    motor: Graph
    state_sets: MappingProxyType
    edge_trans: MappingProxyType

    def __init__(self, motor, state_sets, edge_trans=None):
        states = {v: frozenset(state_sets.get(v, ())) for v in motor.vertices}
        extra = set(state_sets) - motor.vertices
        if extra:
            raise InvalidDynamics(f"state sets for unknown vertices {sorted_ids(extra)}")
        edge_trans = dict(edge_trans or {})
        trans = {}
        for e in motor.edge_list:
            t = edge_trans.pop(e.id, None)
            if t is None:
                t = Transition(states[e.dom], states[e.cod])
            elif not isinstance(t, Transition):
                t = Transition(states[e.dom], states[e.cod], t)
            trans[e.id] = t
        if edge_trans:
            raise InvalidDynamics(f"transitions for unknown edges {sorted_ids(edge_trans)}")
        object.__setattr__(self, "motor", motor)
        object.__setattr__(self, "state_sets", MappingProxyType(states))
        object.__setattr__(self, "edge_trans", MappingProxyType(trans))
        typ = {}
        for v, ss in states.items():
            for s in ss:
                typ.setdefault(s, []).append(v)
        object.__setattr__(self, "_typ", typ)

    def __eq__(self, other):
        if not isinstance(other, Dynamics):
            return NotImplemented
        return (self.motor == other.motor and dict(self.state_sets) == dict(other.state_sets)
                and dict(self.edge_trans) == dict(other.edge_trans))

    __hash__ = None

    def states(self) -> frozenset:
        return frozenset(self._typ)

    def trans(self, eid) -> Transition:
        return self.edge_trans[eid]


def validate_dynamics(d: Dynamics) -> list:
    diags = list(validate_graph(d.motor))
    for s in sorted_ids(d.states()):
        vs = d._typ[s]
        if len(vs) > 1:
            diags.append(f"shared-state {s!r} in {sorted_ids(vs)}")
    for e in d.motor.edge_list:
        t = d.edge_trans[e.id]
        if t.source != d.state_sets[e.dom] or t.target != d.state_sets[e.cod]:
            diags.append(f"context-mismatch {e.id}")
    return diags


def state_type(d: Dynamics, s):
    vs = d._typ.get(s)
    if not vs:
        raise UnknownState(s)
    return vs[0]


class Clock(Dynamics):
    """A deterministic dynamics; its states are instants."""

    def __init__(self, motor, state_sets, edge_trans=None):
        super().__init__(motor, state_sets, edge_trans)
        bad = [eid for eid, t in self.edge_trans.items() if classify(t) is not Determinism.DETERMINISTIC]
        if bad:
            raise InvalidDynamics(f"clock transitions not deterministic on {sorted(bad)}")

    @classmethod
    def from_dynamics(cls, d: Dynamics) -> "Clock":
        return cls(d.motor, d.state_sets, d.edge_trans)

    @classmethod
    def build(cls, motor, instants, steps):
        """`steps` maps edge id to a dict ``instant -> next instant``."""
        return cls(motor, instants, {
            eid: Transition.from_function(instants[motor.edge(eid).dom], instants[motor.edge(eid).cod], fn)
            for eid, fn in steps.items()
        })

    def step(self, eid, t):
        (nxt,) = self.edge_trans[eid].map[t]
        return nxt


def is_clock(d: Dynamics) -> bool:
    return all(classify(t) is Determinism.DETERMINISTIC for t in d.edge_trans.values())


def essential_clock(g: Graph) -> Clock:
    diags = validate_graph(g)
    if diags:
        raise InvalidDynamics("; ".join(diags))
    inst = {v: frozenset({v + ESSENTIAL_SUFFIX}) for v in g.vertices}
    return Clock(g, inst, {
        e.id: Transition(inst[e.dom], inst[e.cod], {e.dom + ESSENTIAL_SUFFIX: {e.cod + ESSENTIAL_SUFFIX}})
        for e in g.edge_list
    })


def succeeds(h: Clock, s, t) -> bool:
    """True when some clock edge sends instant `s` to instant `t`."""
    vs = state_type(h, s)
    state_type(h, t)
    return any(h.edge_trans[e.id].map[s] == frozenset({t}) for e in h.motor.out_edges(vs))


@dataclass(frozen=True, eq=False)
class Dynamorphism:
    graph_part: GraphMorphism
    trans_part: MappingProxyType

    def __init__(self, graph_part, trans_part):
        object.__setattr__(self, "graph_part", graph_part)
        object.__setattr__(self, "trans_part", MappingProxyType(dict(trans_part)))


def _fmt_set(xs):
    return "{" + ",".join(render(x) for x in sorted_ids(xs)) + "}"


def dynamorphism_diagnostics(graph_part: GraphMorphism, trans_part, a: Dynamics, b: Dynamics,
                             edge_trans_b=None) -> list:
    """Check ``δ_T ⊙ e^a ⊂ (Δe)^b ⊙ δ_S`` for every edge ``e: S -> T`` of a's motor.

    `edge_trans_b` overrides how b's transitions are looked up (used for
    parameter slices of multi-dynamics).
    """
    if graph_part.source != a.motor or graph_part.target != b.motor:
        return ["motor-mismatch"]
    diags = [f"graph-morphism {m}" for m in validate_graph_morphism(graph_part)]
    if diags:
        return diags
    look = edge_trans_b or b.edge_trans.__getitem__
    for v in a.motor.sorted_vertices():
        t = trans_part.get(v)
        if t is None:
            diags.append(f"missing-component {v}")
        elif t.source != a.state_sets[v] or t.target != b.state_sets[graph_part.vertex_map[v]]:
            diags.append(f"component-context {v}")
    if diags:
        return diags
    for e in a.motor.edge_list:
        left = compose(a.edge_trans[e.id], trans_part[e.cod])
        right = compose(trans_part[e.dom], look(graph_part.edge_map[e.id]))
        for s in sorted_ids(left.source):
            if not left.map[s] <= right.map[s]:
                extra = left.map[s] - right.map[s]
                diags.append(f"inclusion-fails {e.id} at {render(s)}: {_fmt_set(extra)} not reachable")
    return diags


def validate_dynamorphism(m: Dynamorphism, a: Dynamics, b: Dynamics) -> list:
    return dynamorphism_diagnostics(m.graph_part, m.trans_part, a, b)


def identity_dynamorphism(d: Dynamics) -> Dynamorphism:
    return Dynamorphism(identity_morphism(d.motor),
                        {v: Transition.identity(d.state_sets[v]) for v in d.motor.vertices})


@dataclass(frozen=True, eq=False)
class ScannedDynamics:
    """A dynamics with a clock on the same motor and a date for every state."""

    dyn: Dynamics
    clock: Clock
    datation: MappingProxyType

    def __init__(self, dyn, clock, datation):
        object.__setattr__(self, "dyn", dyn)
        object.__setattr__(self, "clock", clock)
        object.__setattr__(self, "datation", MappingProxyType(dict(datation)))

    def datation_components(self):
        """Per-vertex deterministic transitions ``S^α -> S^h``."""
        return datation_components(self.dyn, self.clock, self.datation)


def datation_components(dyn, clock, datation):
    return {
        v: Transition(dyn.state_sets[v], clock.state_sets[v],
                      {s: {datation[s]} for s in dyn.state_sets[v] if s in datation})
        for v in dyn.motor.vertices
    }


def scanned_diagnostics(dyn: Dynamics, clock: Dynamics, datation) -> list:
    diags = list(validate_dynamics(dyn))
    if dyn.motor != clock.motor:
        return diags + ["motor-mismatch"]
    if not is_clock(clock):
        diags.append("clock-not-deterministic")
    for v in dyn.motor.sorted_vertices():
        for s in sorted_ids(dyn.state_sets[v]):
            if s not in datation:
                diags.append(f"undated-state {s}")
            elif datation[s] not in clock.state_sets[v]:
                diags.append(f"date-type-mismatch {s}")
    if diags:
        return diags
    comps = datation_components(dyn, clock, datation)
    return dynamorphism_diagnostics(identity_morphism(dyn.motor), comps, dyn, clock)


def validate_scanned(A: ScannedDynamics) -> list:
    return scanned_diagnostics(A.dyn, A.clock, A.datation)


def canonical_essential_scansion(d: Dynamics) -> ScannedDynamics:
    h = essential_clock(d.motor)
    return ScannedDynamics(d, h, {s: v + ESSENTIAL_SUFFIX for v in d.motor.vertices for s in d.state_sets[v]})


def auto_scanned(h: Clock) -> ScannedDynamics:
    """The clock scanned by its own identity, ``[h]``."""
    return ScannedDynamics(h, h, {t: t for t in h.states()})


def is_realization(h: Clock, d: Dynamics, x, edge_trans=None) -> bool:
    """Check the one-step characterisation of h-realizations.

    For every edge e and instant t of type dom(e), with t' = e^h(t): if x is
    defined at t' it is defined at t and x(t') ∈ e^d(x(t)).
    """
    if h.motor != d.motor:
        raise MotorMismatch("clock and dynamics must share a motor")
    look = edge_trans or d.edge_trans.__getitem__
    hs = h.states()
    for t, s in x.items():
        if t not in hs:
            return False
        if s not in d.state_sets[state_type(h, t)]:
            return False
    for e in h.motor.edge_list:
        ht = h.edge_trans[e.id]
        dt = look(e.id)
        for t in h.state_sets[e.dom]:
            (t2,) = ht.map[t]
            if t2 in x:
                if t not in x or x[t2] not in dt.map[x[t]]:
                    return False
    return True


def _search(h: Clock, d: Dynamics, candidates, edge_trans=None):
    """Backtracking enumeration of realizations; `candidates(t)` lists states allowed at t."""
    if h.motor != d.motor:
        raise MotorMismatch("clock and dynamics must share a motor")
    look = edge_trans or d.edge_trans.__getitem__
    order = sorted_ids(h.states())
    pos = {t: i for i, t in enumerate(order)}
    # each constraint (t, t2, transition) is checked once both instants are decided
    checks = [[] for _ in order]
    for e in h.motor.edge_list:
        ht = h.edge_trans[e.id]
        dt = look(e.id)
        for t in h.state_sets[e.dom]:
            (t2,) = ht.map[t]
            checks[max(pos[t], pos[t2])].append((t, t2, dt))
    options = [[None] + sorted_ids(candidates(t)) for t in order]
    out = []
    current = {}

    def ok(i):
        for t, t2, dt in checks[i]:
            s2 = current.get(t2)
            if s2 is None:
                continue
            s1 = current.get(t)
            if s1 is None or s2 not in dt.map[s1]:
                return False
        return True

    def go(i):
        if i == len(order):
            out.append(Assignment(current.items()))
            return
        t = order[i]
        for s in options[i]:
            if s is None:
                current.pop(t, None)
            else:
                current[t] = s
            if ok(i):
                go(i + 1)
        current.pop(t, None)

    go(0)
    out.sort(key=Assignment.order_key)
    return out


def enumerate_realizations(h: Clock, d: Dynamics, edge_trans=None) -> list:
    return _search(h, d, lambda t: d.state_sets[state_type(h, t)], edge_trans)


def enumerate_scanned_realizations(A: ScannedDynamics, edge_trans=None) -> list:
    h, d, tau = A.clock, A.dyn, A.datation
    return _search(h, d, lambda t: [s for s in d.state_sets[state_type(h, t)] if tau[s] == t], edge_trans)


def is_scanned_realization(A: ScannedDynamics, x, edge_trans=None) -> bool:
    return (is_realization(A.clock, A.dyn, x, edge_trans)
            and all(A.datation[s] == t for t, s in x.items()))


def validate_scanned_dynamorphism(t3, A: ScannedDynamics, B: ScannedDynamics) -> list:
    """Validate a triple ``(Δ, δ, d)`` between scanned dynamics.

    Requires (Δ, δ) to be a dynamorphism of the dynamics, (Δ, d) one of the
    clocks, and ``τ_{ΔS} ⊙ δ_S ⊂ d_S ⊙ ρ_S`` at every vertex S, where ρ dates A
    and τ dates B.
    """
    delta_g, delta, dclock = t3
    diags = [f"dynamics: {m}" for m in dynamorphism_diagnostics(delta_g, delta, A.dyn, B.dyn)]
    diags += [f"clock: {m}" for m in dynamorphism_diagnostics(delta_g, dclock, A.clock, B.clock)]
    if diags:
        return diags
    rho = A.datation_components()
    tau = B.datation_components()
    for v in A.dyn.motor.sorted_vertices():
        left = compose(delta[v], tau[delta_g.vertex_map[v]])
        right = compose(rho[v], dclock[v])
        if not pointwise_subset(left, right):
            bad = [s for s in sorted_ids(left.source) if not left.map[s] <= right.map[s]]
            diags.append(f"synchronization-fails {v} at {bad[0]}")
    return diags


"""Reader and writer for ``.odf`` family-description files.

The format is line oriented; ``#`` starts a comment. A family file opens
with ``FAMILY <id>`` and then declares graphs, clocks, open dynamics,
components, synchronizations, realizations and the interaction::

    GRAPH g
    V S T
    E e S T
    CLOCK h ON g
    STATE S t0
    TRANS e t0 -> t1
    ODYN A ON g CLOCK h PARAMS u v
    STATE S a
    TRANS e u a -> b
    DATE a t0
    COMPONENT 0 USES A
    SYNCINDEX 0
    SYNC 1 VMAP S=S EMAP e=e CMAP t0=t0
    REAL ab OF 0 PARAM u
    t0 a
    INTERACT
    (0:ab,u) (1:xy,w)

An interaction entry may also give its realization inline, as in
``(0:[t0=a,t1=b],u)``; ``[]`` is the empty realization.
"""

import re
from dataclasses import dataclass, field

from ._ids import Assignment, render, sorted_ids
from .dynamics import Clock, InvalidDynamics
from .family_gen import DynamicFamily, Synchronization, make_interaction
from .graph_core import Graph, GraphMorphism, validate_graph
from .open_dyn import MultiDynamics, OpenDynamics, OpenRealization, is_open_realization, param_realizations
from .transitions import ContextMismatch


class ParseError(ValueError):
    def __init__(self, message, line=None):
        self.message = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


BLOCKS = ("FAMILY", "GRAPH", "CLOCK", "ODYN", "COMPONENT", "SYNC", "SYNCINDEX", "REAL", "INTERACT")
_ENTRY = re.compile(r"^\((?P<i>[^:()]+):(?P<ref>\[[^\]]*\]|[^,()\[\]]+),(?P<param>[^()]+)\)$")


@dataclass
class _Block:
    kind: str
    line: int
    head: list
    body: list = field(default_factory=list)


@dataclass
class FamilyDocument:
    name: str
    graphs: dict
    clocks: dict
    odyns: dict
    graph_of: dict
    clock_of: dict
    components: dict
    sync_index: str
    synchronizations: dict
    realizations: dict
    tuples: list
    family: DynamicFamily


def _tokens(text):
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line.split()


def _blocks(text):
    blocks = []
    for n, toks in _tokens(text):
        if toks[0] in BLOCKS:
            blocks.append(_Block(toks[0], n, toks[1:]))
        elif not blocks:
            raise ParseError(f"unexpected line before any block: {toks[0]}", n)
        else:
            blocks[-1].body.append((n, toks))
    return blocks


def _expect(cond, msg, line):
    if not cond:
        raise ParseError(msg, line)


def _pairs(tokens, line):
    out = {}
    for tok in tokens:
        _expect("=" in tok, f"expected key=value, got {tok!r}", line)
        k, v = tok.split("=", 1)
        _expect(k not in out, f"duplicate key {k!r}", line)
        out[k] = v
    return out


class _Reader:
    def __init__(self):
        self.graphs = {}
        self.clocks = {}
        self.clock_graph = {}
        self.odyns = {}
        self.odyn_graph = {}
        self.odyn_clock = {}

    def _new_id(self, table, key, what, line):
        _expect(key not in table, f"duplicate {what} id {key!r}", line)

    def graph(self, b):
        _expect(len(b.head) == 1, "GRAPH takes exactly one id", b.line)
        gid = b.head[0]
        self._new_id(self.graphs, gid, "graph", b.line)
        vertices, edges = set(), {}
        for n, toks in b.body:
            if toks[0] == "V":
                for v in toks[1:]:
                    _expect(v not in vertices, f"duplicate vertex {v!r}", n)
                    vertices.add(v)
            elif toks[0] == "E":
                _expect(len(toks) == 4, "E takes <edge> <src> <dst>", n)
                _expect(toks[1] not in edges, f"duplicate edge {toks[1]!r}", n)
                edges[toks[1]] = (toks[1], toks[2], toks[3], n)
            else:
                raise ParseError(f"unexpected {toks[0]!r} in GRAPH block", n)
        for eid, src, dst, n in edges.values():
            _expect(src in vertices and dst in vertices, f"edge {eid!r} has an unknown endpoint", n)
        g = Graph.build(vertices, [(e, s, d) for e, s, d, _ in edges.values()])
        self.graphs[gid] = g

    def _graph_ref(self, gid, line):
        _expect(gid in self.graphs, f"unknown graph {gid!r}", line)
        return self.graphs[gid]

    def _states(self, b, g, what):
        states, where = {v: set() for v in g.vertices}, {}
        for n, toks in b.body:
            if toks[0] != "STATE":
                continue
            _expect(len(toks) >= 2, "STATE takes <vertex> <id>...", n)
            v = toks[1]
            _expect(v in g.vertices, f"unknown vertex {v!r}", n)
            for s in toks[2:]:
                _expect(s not in where, f"duplicate {what} {s!r}", n)
                where[s] = v
                states[v].add(s)
        return states, where

    def clock(self, b):
        _expect(len(b.head) == 3 and b.head[1] == "ON", "expected CLOCK <id> ON <graph>", b.line)
        cid, _, gid = b.head
        self._new_id(self.clocks, cid, "clock", b.line)
        g = self._graph_ref(gid, b.line)
        inst, where = self._states(b, g, "instant")
        steps = {e.id: {} for e in g.edge_list}
        for n, toks in b.body:
            if toks[0] == "STATE":
                continue
            _expect(toks[0] == "TRANS", f"unexpected {toks[0]!r} in CLOCK block", n)
            _expect(len(toks) == 5 and toks[3] == "->", "expected TRANS <edge> <inst> -> <inst>", n)
            eid, t1, t2 = toks[1], toks[2], toks[4]
            _expect(eid in g.edges, f"unknown edge {eid!r}", n)
            e = g.edge(eid)
            _expect(where.get(t1) == e.dom, f"instant {t1!r} is not of type {e.dom!r}", n)
            _expect(where.get(t2) == e.cod, f"instant {t2!r} is not of type {e.cod!r}", n)
            _expect(t1 not in steps[eid], f"second successor of {t1!r} along {eid!r}", n)
            steps[eid][t1] = t2
        for e in g.edge_list:
            missing = inst[e.dom] - set(steps[e.id])
            _expect(not missing, f"clock edge {e.id!r} has no successor for {sorted_ids(missing)}", b.line)
        try:
            self.clocks[cid] = Clock.build(g, inst, steps)
        except (InvalidDynamics, ContextMismatch) as exc:
            raise ParseError(str(exc), b.line) from None
        self.clock_graph[cid] = gid

    def odyn(self, b):
        head = b.head
        ok = len(head) >= 7 and head[1] == "ON" and head[3] == "CLOCK" and head[5] == "PARAMS"
        _expect(ok, "expected ODYN <id> ON <graph> CLOCK <clock> PARAMS <p>...", b.line)
        did, gid, cid, params = head[0], head[2], head[4], head[6:]
        self._new_id(self.odyns, did, "dynamics", b.line)
        g = self._graph_ref(gid, b.line)
        _expect(cid in self.clocks, f"unknown clock {cid!r}", b.line)
        _expect(self.clock_graph[cid] == gid, f"clock {cid!r} is not on graph {gid!r}", b.line)
        _expect(len(set(params)) == len(params), "duplicate parameter", b.line)
        h = self.clocks[cid]
        states, where = self._states(b, g, "state")
        trans, dates = {}, {}
        for n, toks in b.body:
            kind = toks[0]
            if kind == "STATE":
                continue
            if kind == "TRANS":
                _expect(len(toks) >= 5 and toks[4] == "->", "expected TRANS <edge> <param> <s> -> <s>...", n)
                eid, mu, a, targets = toks[1], toks[2], toks[3], toks[5:]
                _expect(eid in g.edges, f"unknown edge {eid!r}", n)
                _expect(mu in params, f"unknown parameter {mu!r}", n)
                e = g.edge(eid)
                _expect(where.get(a) == e.dom, f"state {a!r} is not of type {e.dom!r}", n)
                for s in targets:
                    _expect(where.get(s) == e.cod, f"state {s!r} is not of type {e.cod!r}", n)
                img = trans.setdefault((eid, mu), {}).setdefault(a, set())
                img.update(targets)
            elif kind == "DATE":
                _expect(len(toks) == 3, "expected DATE <state> <instant>", n)
                s, t = toks[1], toks[2]
                _expect(s in where, f"unknown state {s!r}", n)
                _expect(t in h.states(), f"unknown instant {t!r}", n)
                _expect(s not in dates, f"second date for {s!r}", n)
                dates[s] = t
            else:
                raise ParseError(f"unexpected {kind!r} in ODYN block", n)
        undated = set(where) - set(dates)
        _expect(not undated, f"undated states {sorted_ids(undated)}", b.line)
        self.odyns[did] = OpenDynamics(MultiDynamics(g, params, states, trans), h, dates)
        self.odyn_graph[did] = gid
        self.odyn_clock[did] = cid


def _read_definitions(blocks):
    r = _Reader()
    for b in blocks:
        if b.kind == "GRAPH":
            r.graph(b)
        elif b.kind == "CLOCK":
            r.clock(b)
        elif b.kind == "ODYN":
            r.odyn(b)
    return r


def parse_open_dynamics(text, name=None) -> OpenDynamics:
    """Read a dynamics document (GRAPH, CLOCK and ODYN blocks) and return one ODYN.

    `name` picks the ODYN block; it may be omitted when there is exactly one.
    """
    blocks = _blocks(text)
    for b in blocks:
        _expect(b.kind in ("GRAPH", "CLOCK", "ODYN"), f"{b.kind} block in a dynamics document", b.line)
    r = _read_definitions(blocks)
    if name is None:
        _expect(len(r.odyns) == 1, "expected exactly one ODYN block", None)
        return next(iter(r.odyns.values()))
    _expect(name in r.odyns, f"no ODYN block named {name!r}", None)
    return r.odyns[name]


def _parse_literal(tok, line):
    body = tok[1:-1].strip()
    pairs = []
    if body:
        for item in body.split(","):
            _expect("=" in item, f"bad realization literal {tok!r}", line)
            t, s = item.split("=", 1)
            pairs.append((t, s))
    x = Assignment(pairs)
    _expect(len(x) == len(pairs), f"instant repeated in {tok!r}", line)
    return x


def parse_family(text) -> FamilyDocument:
    blocks = _blocks(text)
    if not blocks or blocks[0].kind != "FAMILY":
        raise ParseError("missing FAMILY header", blocks[0].line if blocks else None)
    _expect(len(blocks[0].head) == 1 and not blocks[0].body, "expected FAMILY <id>", blocks[0].line)
    fam_name = blocks[0].head[0]
    r = _read_definitions(blocks)

    components, comp_line = {}, {}
    sync_index, sync_specs, real_blocks, interact = None, {}, [], None
    for b in blocks[1:]:
        if b.kind == "FAMILY":
            raise ParseError("second FAMILY header", b.line)
        if b.kind in ("COMPONENT", "SYNC", "SYNCINDEX"):
            _expect(not b.body, f"{b.kind} takes no body lines", b.body[0][0] if b.body else b.line)
        if b.kind == "COMPONENT":
            _expect(len(b.head) == 3 and b.head[1] == "USES", "expected COMPONENT <i> USES <odyn>", b.line)
            i, did = b.head[0], b.head[2]
            _expect(i not in components, f"duplicate component {i!r}", b.line)
            _expect(did in r.odyns, f"unknown dynamics {did!r}", b.line)
            components[i] = did
            comp_line[i] = b.line
        elif b.kind == "SYNCINDEX":
            _expect(len(b.head) == 1, "expected SYNCINDEX <i>", b.line)
            _expect(sync_index is None, "second SYNCINDEX", b.line)
            sync_index = (b.head[0], b.line)
        elif b.kind == "SYNC":
            _expect(b.head, "expected SYNC <i> VMAP ... EMAP ... CMAP ...", b.line)
            i = b.head[0]
            _expect(i not in sync_specs, f"duplicate synchronization for {i!r}", b.line)
            sections, cur = {"VMAP": [], "EMAP": [], "CMAP": []}, None
            for tok in b.head[1:]:
                if tok in sections:
                    cur = tok
                else:
                    _expect(cur is not None, f"unexpected token {tok!r}", b.line)
                    sections[cur].append(tok)
            sync_specs[i] = ({k: _pairs(v, b.line) for k, v in sections.items()}, b.line)
        elif b.kind == "REAL":
            real_blocks.append(b)
        elif b.kind == "INTERACT":
            _expect(interact is None, "second INTERACT block", b.line)
            _expect(not b.head, "INTERACT takes no arguments", b.line)
            interact = b

    _expect(components, "no COMPONENT declared", None)
    _expect(sync_index is not None, "missing SYNCINDEX", None)
    i0, i0_line = sync_index
    _expect(i0 in components, f"unknown synchronizer component {i0!r}", i0_line)
    comps = {i: r.odyns[did] for i, did in components.items()}

    syncs = {}
    g0 = r.graphs[r.odyn_graph[components[i0]]]
    h0 = comps[i0].clock
    for i, (spec, line) in sync_specs.items():
        _expect(i in components, f"unknown component {i!r}", line)
        _expect(i != i0, "the synchronizer takes no SYNC line", line)
        gi = comps[i].motor
        hi = comps[i].clock
        for v, w in spec["VMAP"].items():
            _expect(v in g0.vertices, f"unknown vertex {v!r}", line)
            _expect(w in gi.vertices, f"unknown vertex {w!r}", line)
        for e, f in spec["EMAP"].items():
            _expect(e in g0.edges, f"unknown edge {e!r}", line)
            _expect(f in gi.edges, f"unknown edge {f!r}", line)
        for t, u in spec["CMAP"].items():
            _expect(t in h0.states(), f"unknown instant {t!r}", line)
            _expect(u in hi.states(), f"unknown instant {u!r}", line)
        missing = (g0.vertices - set(spec["VMAP"])) | (set(g0.edges) - set(spec["EMAP"]))
        _expect(not missing, f"synchronization misses {sorted_ids(missing)}", line)
        undated = h0.states() - set(spec["CMAP"])
        _expect(not undated, f"synchronization misses instants {sorted_ids(undated)}", line)
        syncs[i] = Synchronization(GraphMorphism(g0, gi, spec["VMAP"], spec["EMAP"]), spec["CMAP"])

    reals = {}
    for b in real_blocks:
        ok = len(b.head) == 5 and b.head[1] == "OF" and b.head[3] == "PARAM"
        _expect(ok, "expected REAL <rid> OF <i> PARAM <p>", b.line)
        rid, i, mu = b.head[0], b.head[2], b.head[4]
        _expect(i in components, f"unknown component {i!r}", b.line)
        _expect((i, rid) not in reals, f"duplicate realization {rid!r}", b.line)
        A = comps[i]
        _expect(mu in A.params, f"unknown parameter {mu!r}", b.line)
        pairs = []
        for n, toks in b.body:
            _expect(len(toks) == 2, "expected <instant> <state>", n)
            _expect(toks[0] in A.clock.states(), f"unknown instant {toks[0]!r}", n)
            _expect(toks[1] in A.states(), f"unknown state {toks[1]!r}", n)
            _expect(toks[0] not in dict(pairs), f"instant {toks[0]!r} assigned twice", n)
            pairs.append((toks[0], toks[1]))
        x = Assignment(pairs)
        _expect(is_open_realization(A, OpenRealization(mu, x)),
                f"{rid!r} is not a realization of component {i!r} for parameter {mu!r}", b.line)
        reals[(i, rid)] = x

    _expect(interact is not None, "missing INTERACT block", None)
    known = {i: frozenset(x for mu in comps[i].params for x in param_realizations(comps[i], mu)) for i in comps}
    tuples = []
    for n, toks in interact.body:
        entry = {}
        for tok in toks:
            m = _ENTRY.match(tok)
            _expect(m is not None, f"malformed interaction entry {tok!r}", n)
            i, ref, mu = m.group("i"), m.group("ref"), m.group("param")
            _expect(i in components, f"unknown component {i!r}", n)
            _expect(i not in entry, f"component {i!r} appears twice", n)
            _expect(mu in comps[i].params, f"unknown parameter {mu!r}", n)
            if ref.startswith("["):
                x = _parse_literal(ref, n)
                _expect(x in known[i], f"{ref} is not a realization of component {i!r}", n)
            else:
                _expect((i, ref) in reals, f"unknown realization {ref!r} of component {i!r}", n)
                x = reals[(i, ref)]
            entry[i] = (x, mu)
        _expect(set(entry) == set(components), "interaction tuple must cover every component", n)
        tuples.append(entry)

    R = make_interaction(comps, tuples)
    family = DynamicFamily(frozenset(components), i0, comps, R, syncs)
    return FamilyDocument(
        name=fam_name,
        graphs=r.graphs,
        clocks=r.clocks,
        odyns=r.odyns,
        graph_of=r.odyn_graph,
        clock_of=r.odyn_clock,
        components=components,
        sync_index=i0,
        synchronizations=syncs,
        realizations=reals,
        tuples=tuples,
        family=family,
    )


def _token(x) -> str:
    tok = render(x)
    if not tok or any(c.isspace() for c in tok) or "#" in tok or tok == "->" or tok in BLOCKS:
        raise ValueError(f"identifier {tok!r} cannot be written as a single token")
    return tok


def _line(*parts):
    return " ".join(parts)


def serialize_graph(g: Graph, name) -> list:
    if validate_graph(g):
        raise ValueError("cannot serialize an invalid graph")
    lines = [_line("GRAPH", _token(name))]
    if g.vertices:
        lines.append(_line("V", *map(_token, g.sorted_vertices())))
    for e in g.edge_list:
        lines.append(_line("E", _token(e.id), _token(e.dom), _token(e.cod)))
    return lines


def serialize_clock(h: Clock, name, graph_name) -> list:
    lines = [_line("CLOCK", _token(name), "ON", _token(graph_name))]
    for v in h.motor.sorted_vertices():
        if h.state_sets[v]:
            lines.append(_line("STATE", _token(v), *map(_token, sorted_ids(h.state_sets[v]))))
    for e in h.motor.edge_list:
        for t in sorted_ids(h.state_sets[e.dom]):
            lines.append(_line("TRANS", _token(e.id), _token(t), "->", _token(h.step(e.id, t))))
    return lines


def serialize_open_dynamics(d: OpenDynamics, name="dyn", graph_name="motor", clock_name="clock") -> str:
    """Canonical text for an open dynamics, with its graph and clock.

    Only nonempty transition images are written; everything is sorted.
    """
    lines = serialize_graph(d.motor, graph_name)
    lines += serialize_clock(d.clock, clock_name, graph_name)
    params = d.multi.sorted_params()
    lines.append(_line("ODYN", _token(name), "ON", _token(graph_name), "CLOCK", _token(clock_name),
                       "PARAMS", *map(_token, params)))
    for v in d.motor.sorted_vertices():
        if d.multi.state_sets[v]:
            lines.append(_line("STATE", _token(v), *map(_token, sorted_ids(d.multi.state_sets[v]))))
    for e in d.motor.edge_list:
        for mu in params:
            t = d.trans(e.id, mu)
            for a in sorted_ids(t.source):
                if t.map[a]:
                    lines.append(_line("TRANS", _token(e.id), _token(mu), _token(a), "->",
                                       *map(_token, sorted_ids(t.map[a]))))
    for s in sorted_ids(d.states()):
        lines.append(_line("DATE", _token(s), _token(d.datation[s])))
    return "\n".join(lines) + "\n"

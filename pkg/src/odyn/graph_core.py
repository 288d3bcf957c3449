"""Finite directed multigraphs (motors) and graph morphisms."""

from dataclasses import dataclass, field
from types import MappingProxyType

from ._ids import sorted_ids


class InvalidGraph(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    dom: str
    cod: str


@dataclass(frozen=True)
class Graph:
    """A motor: vertices plus named edges. Parallel edges and loops are allowed."""

    vertices: frozenset = frozenset()
    edge_list: tuple = ()
    _by_id: MappingProxyType = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        edges = tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edge_list)
        object.__setattr__(self, "edge_list", tuple(sorted(edges, key=lambda e: e.id)))
        by_id = {}
        for e in edges:
            by_id.setdefault(e.id, e)
        object.__setattr__(self, "_by_id", MappingProxyType(by_id))

    @classmethod
    def build(cls, vertices, edges=()):
        """`edges` is an iterable of ``(edge_id, dom, cod)`` triples."""
        return cls(frozenset(vertices), tuple(Edge(*e) for e in edges))

    @property
    def edges(self):
        return self._by_id

    def edge(self, eid) -> Edge:
        return self._by_id[eid]

    def out_edges(self, v):
        return [e for e in self.edge_list if e.dom == v]

    def sorted_vertices(self):
        return sorted_ids(self.vertices)


def validate_graph(g: Graph) -> list:
    diags = []
    seen = set()
    for e in g.edge_list:
        if e.id in seen:
            diags.append(f"duplicate-edge {e.id}")
        seen.add(e.id)
        if e.dom not in g.vertices or e.cod not in g.vertices:
            diags.append(f"dangling-endpoint {e.id}")
    return diags


def _require_valid(g: Graph):
    diags = validate_graph(g)
    if diags:
        raise InvalidGraph("; ".join(diags))


@dataclass(frozen=True)
class GraphMorphism:
    source: Graph
    target: Graph
    vertex_map: MappingProxyType
    edge_map: MappingProxyType

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", MappingProxyType(dict(self.vertex_map)))
        object.__setattr__(self, "edge_map", MappingProxyType(dict(self.edge_map)))

    def __eq__(self, other):
        if not isinstance(other, GraphMorphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.vertex_map) == dict(other.vertex_map)
                and dict(self.edge_map) == dict(other.edge_map))

    __hash__ = None


def identity_morphism(g: Graph) -> GraphMorphism:
    _require_valid(g)
    return GraphMorphism(g, g, {v: v for v in g.vertices}, {e.id: e.id for e in g.edge_list})


def validate_graph_morphism(m: GraphMorphism) -> list:
    src, tgt = m.source, m.target
    diags = []
    for v in src.sorted_vertices():
        if v not in m.vertex_map:
            diags.append(f"unmapped-vertex {v}")
        elif m.vertex_map[v] not in tgt.vertices:
            diags.append(f"vertex-image-missing {v}")
    for e in src.edge_list:
        if e.id not in m.edge_map:
            diags.append(f"unmapped-edge {e.id}")
            continue
        img = tgt.edges.get(m.edge_map[e.id])
        if img is None:
            diags.append(f"edge-image-missing {e.id}")
            continue
        if img.dom != m.vertex_map.get(e.dom) or img.cod != m.vertex_map.get(e.cod):
            diags.append(f"incoherent {e.id}")
    return diags


def compose_morphisms(second: GraphMorphism, first: GraphMorphism) -> GraphMorphism:
    """``second ∘ first``; `first.target` must be `second.source`."""
    if first.target != second.source:
        raise InvalidGraph("morphisms are not composable")
    return GraphMorphism(
        first.source,
        second.target,
        {v: second.vertex_map[w] for v, w in first.vertex_map.items()},
        {e: second.edge_map[f] for e, f in first.edge_map.items()},
    )

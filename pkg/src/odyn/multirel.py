"""Multiple relations, binary multiple relations and connective structure.

A multiple relation over an index I is a set of total tuples, each tuple a
mapping slot -> value. Tuples are stored as ``frozenset`` of ``(slot, value)``
pairs so they hash; `as_dict` turns one back into a dict.

Restriction to a sub-index projects tuples, and the tensor of two relations
with disjoint indexes is the set of tuples whose two projections both belong
to the operands.
"""

from dataclasses import dataclass
from itertools import combinations, product
from types import MappingProxyType

from ._ids import sort_key, sorted_ids


class RelationError(ValueError):
    pass


IN, OUT = 0, 1


def make_tuple(mapping) -> frozenset:
    return frozenset(dict(mapping).items())


def as_dict(tup) -> dict:
    return dict(tup)


def project(tup, slots) -> frozenset:
    return frozenset((k, v) for k, v in tup if k in slots)


@dataclass(frozen=True, eq=False)
class MultipleRelation:
    index: frozenset
    contexts: MappingProxyType
    graph: frozenset

    def __init__(self, contexts, graph=()):
        contexts = {i: frozenset(vals) for i, vals in dict(contexts).items()}
        for i, vals in contexts.items():
            if not vals:
                raise RelationError(f"empty context at slot {i!r}")
        index = frozenset(contexts)
        tuples = set()
        for t in graph:
            t = make_tuple(t) if isinstance(t, dict) else frozenset(t)
            d = dict(t)
            if set(d) != index or len(d) != len(t):
                raise RelationError(f"tuple {sorted_pairs(t)} is not total over the index")
            for i, v in d.items():
                if v not in contexts[i]:
                    raise RelationError(f"value {v!r} outside the context of slot {i!r}")
            tuples.add(t)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "contexts", MappingProxyType(contexts))
        object.__setattr__(self, "graph", frozenset(tuples))

    def __eq__(self, other):
        if not isinstance(other, MultipleRelation):
            return NotImplemented
        return dict(self.contexts) == dict(other.contexts) and self.graph == other.graph

    __hash__ = None

    def __len__(self):
        return len(self.graph)

    def sorted_graph(self):
        return sorted(self.graph, key=tuple_key)


def sorted_pairs(tup):
    return sorted(tup, key=lambda kv: sort_key(kv[0]))


def tuple_key(tup):
    return tuple((sort_key(k), sort_key(v)) for k, v in sorted_pairs(tup))


def _check_contexts(index, contexts):
    missing = set(index) - set(contexts)
    if missing:
        raise RelationError(f"no context for slots {sorted_ids(missing)}")


def constant_relation(index, contexts, kind) -> MultipleRelation:
    """``0_J`` (``kind='zero'``, empty graph) or ``1_J`` (``kind='one'``, full product)."""
    index = frozenset(index)
    _check_contexts(index, contexts)
    ctx = {i: frozenset(contexts[i]) for i in index}
    if kind == "zero":
        return MultipleRelation(ctx)
    if kind != "one":
        raise RelationError(f"unknown constant kind {kind!r}")
    slots = sorted_ids(index)
    for i in slots:
        if not ctx[i]:
            raise RelationError(f"empty context at slot {i!r}")
    full = [frozenset(zip(slots, vals)) for vals in product(*(sorted_ids(ctx[i]) for i in slots))]
    return MultipleRelation(ctx, full)


def restrict(R: MultipleRelation, J) -> MultipleRelation:
    J = frozenset(J)
    if not J <= R.index:
        raise RelationError(f"slots {sorted_ids(J - R.index)} are not in the index")
    return MultipleRelation({i: R.contexts[i] for i in J}, {project(t, J) for t in R.graph})


def tensor(Rk: MultipleRelation, Rl: MultipleRelation) -> MultipleRelation:
    if Rk.index & Rl.index:
        raise RelationError("tensor needs disjoint indexes")
    ctx = {**Rk.contexts, **Rl.contexts}
    return MultipleRelation(ctx, {a | b for a in Rk.graph for b in Rl.graph})


@dataclass(frozen=True, eq=False)
class BinaryMultipleRelation:
    """Slot i carries ``(in_value, out_value)`` pairs from ``A_i × B_i``."""

    index: frozenset
    in_contexts: MappingProxyType
    out_contexts: MappingProxyType
    graph: frozenset

    def __init__(self, in_contexts, out_contexts, graph=()):
        in_ctx = {i: frozenset(v) for i, v in dict(in_contexts).items()}
        out_ctx = {i: frozenset(v) for i, v in dict(out_contexts).items()}
        if set(in_ctx) != set(out_ctx):
            raise RelationError("entry and exit contexts must share the index")
        for i in in_ctx:
            if not in_ctx[i] or not out_ctx[i]:
                raise RelationError(f"empty context at slot {i!r}")
        index = frozenset(in_ctx)
        tuples = set()
        for t in graph:
            d = dict(t)
            if set(d) != index:
                raise RelationError("tuple is not total over the index")
            for i, pair in d.items():
                a, b = pair
                if a not in in_ctx[i] or b not in out_ctx[i]:
                    raise RelationError(f"pair at slot {i!r} leaves its context")
            tuples.add(frozenset((i, (a, b)) for i, (a, b) in d.items()))
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "in_contexts", MappingProxyType(in_ctx))
        object.__setattr__(self, "out_contexts", MappingProxyType(out_ctx))
        object.__setattr__(self, "graph", frozenset(tuples))

    def __eq__(self, other):
        if not isinstance(other, BinaryMultipleRelation):
            return NotImplemented
        return (dict(self.in_contexts) == dict(other.in_contexts)
                and dict(self.out_contexts) == dict(other.out_contexts) and self.graph == other.graph)

    __hash__ = None

    def sorted_graph(self):
        return sorted(self.graph, key=tuple_key)


def rd(C: BinaryMultipleRelation) -> MultipleRelation:
    """Split every pair into two slots ``(i, 0)`` and ``(i, 1)`` of the doubled index."""
    ctx = {}
    for i in C.index:
        ctx[(i, IN)] = C.in_contexts[i]
        ctx[(i, OUT)] = C.out_contexts[i]
    graph = {frozenset(kv for i, (a, b) in t for kv in (((i, IN), a), ((i, OUT), b))) for t in C.graph}
    return MultipleRelation(ctx, graph)


def rm(C: BinaryMultipleRelation) -> MultipleRelation:
    ctx = {i: frozenset(product(C.in_contexts[i], C.out_contexts[i])) for i in C.index}
    return MultipleRelation(ctx, C.graph)


def rb_pairs(C: BinaryMultipleRelation):
    """The graph of rb(C) as ``(in_tuple, out_tuple)`` pairs."""
    return {(frozenset((i, a) for i, (a, _) in t), frozenset((i, b) for i, (_, b) in t)) for t in C.graph}


def rb_image(C: BinaryMultipleRelation) -> frozenset:
    return frozenset(b for _, b in rb_pairs(C))


def rb_preimage(C: BinaryMultipleRelation, mu) -> frozenset:
    mu = make_tuple(mu) if isinstance(mu, dict) else frozenset(mu)
    d = dict(mu)
    if set(d) != C.index or len(d) != len(mu):
        raise RelationError("out-tuple is not total over the index")
    for i, b in d.items():
        if b not in C.out_contexts[i]:
            raise RelationError(f"value {b!r} outside the exit context of slot {i!r}")
    return frozenset(a for a, b in rb_pairs(C) if b == mu)


@dataclass(frozen=True, eq=False)
class PartialFamily:
    """Values on a subset W of the doubled index; slot ``(i, 0)`` holds an entry value, ``(i, 1)`` an exit value."""

    values: MappingProxyType

    def __init__(self, values=()):
        object.__setattr__(self, "values", MappingProxyType(dict(values)))

    @classmethod
    def of(cls, entries=None, exits=None):
        vals = {(i, IN): a for i, a in (entries or {}).items()}
        vals.update({(i, OUT): b for i, b in (exits or {}).items()})
        return cls(vals)

    @property
    def slots(self):
        return frozenset(self.values)

    def __eq__(self, other):
        if not isinstance(other, PartialFamily):
            return NotImplemented
        return dict(self.values) == dict(other.values)

    def __hash__(self):
        return hash(frozenset(self.values.items()))

    def __repr__(self):
        body = ", ".join(f"{k}↦{v!r}" for k, v in sorted(self.values.items(), key=lambda kv: sort_key(str(kv[0]))))
        return f"PartialFamily({body})"


def join(q: PartialFamily, r: PartialFamily) -> PartialFamily:
    """``q + r``; the two families must agree on shared slots."""
    for z in q.slots & r.slots:
        if q.values[z] != r.values[z]:
            raise RelationError(f"families disagree at slot {z!r}")
    return PartialFamily({**q.values, **r.values})


class Compatibility:
    """Membership tests for restrictions of ``rd(C)``, cached per slot set."""

    def __init__(self, C: BinaryMultipleRelation):
        self.C = C
        self.doubled = rd(C)
        self._cache = {}

    def projections(self, W) -> frozenset:
        W = frozenset(W)
        hit = self._cache.get(W)
        if hit is None:
            hit = self._cache[W] = frozenset(project(t, W) for t in self.doubled.graph)
        return hit

    def __call__(self, p: PartialFamily) -> bool:
        alien = p.slots - self.doubled.index
        if alien:
            raise RelationError(f"slots {sorted(map(str, alien))} are not in the doubled index")
        return frozenset(p.values.items()) in self.projections(p.slots)


def is_compatible(C: BinaryMultipleRelation, p: PartialFamily) -> bool:
    return Compatibility(C)(p)


def is_splittable(R: MultipleRelation, J, K, L) -> bool:
    J, K, L = frozenset(J), frozenset(K), frozenset(L)
    if not K or not L or K & L or K | L != J:
        raise RelationError("K and L must be a bipartition of J into nonempty parts")
    return restrict(R, J).graph == tensor(restrict(R, K), restrict(R, L)).graph


def bipartitions(J):
    """Unordered splits of J into two nonempty parts."""
    items = sorted_ids(J)
    if len(items) < 2:
        return
    first, rest = items[0], items[1:]
    for r in range(0, len(rest)):
        for extra in combinations(rest, r):
            K = frozenset((first,) + extra)
            yield K, frozenset(items) - K


def subset_key(J):
    return (len(J), tuple(sort_key(x) for x in sorted_ids(J)))


def connective_structure_of(R: MultipleRelation, include_empty=False) -> list:
    out = []
    items = sorted_ids(R.index)
    for r in range(0 if include_empty else 1, len(items) + 1):
        for J in combinations(items, r):
            J = frozenset(J)
            if not any(is_splittable(R, J, K, L) for K, L in bipartitions(J)):
                out.append(J)
    out.sort(key=subset_key)
    return out


def connective_structure(C: BinaryMultipleRelation, include_empty=False) -> list:
    """Non-splittable subsets of the index of ``rm(C)``, by size then lexicographically.

    The empty subset has no bipartition either; it is left out unless
    `include_empty` is set.
    """
    return connective_structure_of(rm(C), include_empty)

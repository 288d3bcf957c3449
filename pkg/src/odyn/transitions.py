"""Set-valued transitions ``A ⇝ B`` and parameter-indexed families of them.

A transition stores an explicit total map; an undefined point maps to the
empty set, so functions, partial functions and relations share one
representation.
"""

from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType

from ._ids import sorted_ids


class ContextMismatch(ValueError):
    pass


class Determinism(str, Enum):
    DETERMINISTIC = "deterministic"
    QUASI_DETERMINISTIC = "quasi-deterministic"
    GENERAL = "general"


@dataclass(frozen=True, eq=False)
class Transition:
    source: frozenset
    target: frozenset
    map: MappingProxyType

    def __init__(self, source, target, mapping=None):
        source = frozenset(source)
        target = frozenset(target)
        mapping = dict(mapping or {})
        extra = set(mapping) - source
        if extra:
            raise ContextMismatch(f"map defined outside source: {sorted_ids(extra)}")
        full = {}
        for a in source:
            img = frozenset(mapping.get(a, ()))
            if not img <= target:
                raise ContextMismatch(f"image of {a!r} leaves the target set")
            full[a] = img
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "map", MappingProxyType(full))

    def __call__(self, a) -> frozenset:
        return self.map[a]

    def __eq__(self, other):
        if not isinstance(other, Transition):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and dict(self.map) == dict(other.map))

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{a!r}↦{sorted_ids(self.map[a])}" for a in sorted_ids(self.source))
        return f"Transition({body})"

    @classmethod
    def identity(cls, states):
        return cls(states, states, {a: {a} for a in states})

    @classmethod
    def from_function(cls, source, target, fn):
        """Deterministic or quasi-deterministic transition from a dict ``a -> b``."""
        return cls(source, target, {a: {b} for a, b in fn.items()})

    def pairs(self):
        return {(a, b) for a, img in self.map.items() for b in img}


def compose(f: Transition, g: Transition) -> Transition:
    """``g ⊙ f``: first `f`, then `g`."""
    if f.target != g.source:
        raise ContextMismatch("middle sets differ")
    return Transition(
        f.source,
        g.target,
        {a: frozenset().union(*(g.map[b] for b in f.map[a])) for a in f.source},
    )


def image(f: Transition) -> frozenset:
    return frozenset().union(*f.map.values())


def classify(f: Transition) -> Determinism:
    sizes = [len(img) for img in f.map.values()]
    if all(n == 1 for n in sizes):
        return Determinism.DETERMINISTIC
    if all(n <= 1 for n in sizes):
        return Determinism.QUASI_DETERMINISTIC
    return Determinism.GENERAL


def pointwise_subset(f: Transition, g: Transition) -> bool:
    if f.source != g.source or f.target != g.target:
        raise ContextMismatch("pointwise inclusion needs equal source and target")
    return all(f.map[a] <= g.map[a] for a in f.source)


@dataclass(frozen=True, eq=False)
class TransitionFamily:
    params: frozenset
    source: frozenset
    target: frozenset
    per_param: MappingProxyType

    def __init__(self, per_param, source=None, target=None):
        per_param = dict(per_param)
        if not per_param:
            raise ContextMismatch("a transition family needs at least one parameter")
        first = next(iter(per_param.values()))
        source = first.source if source is None else frozenset(source)
        target = first.target if target is None else frozenset(target)
        for mu, t in per_param.items():
            if t.source != source or t.target != target:
                raise ContextMismatch(f"member {mu!r} does not share the family context")
        object.__setattr__(self, "params", frozenset(per_param))
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "per_param", MappingProxyType(per_param))

    def __getitem__(self, mu) -> Transition:
        return self.per_param[mu]

    def __eq__(self, other):
        if not isinstance(other, TransitionFamily):
            return NotImplemented
        return dict(self.per_param) == dict(other.per_param)

    __hash__ = None

    @classmethod
    def identity(cls, params, states):
        return cls({mu: Transition.identity(states) for mu in params})


def compose_family(f: TransitionFamily, g: TransitionFamily) -> TransitionFamily:
    if f.params != g.params:
        raise ContextMismatch("parameter sets differ")
    if f.target != g.source:
        raise ContextMismatch("middle sets differ")
    return TransitionFamily({mu: compose(f[mu], g[mu]) for mu in f.params}, f.source, g.target)

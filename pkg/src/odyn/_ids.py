"""Canonical ordering and text rendering of identifiers.

Plain identifiers are strings. Generated dynamics use tuples of identifiers
for product states and parameters, and realizations are `Assignment`
values; all of them must sort deterministically and render to a single
whitespace-free token.
"""

from collections.abc import Mapping


def sort_key(x):
    if isinstance(x, str):
        return (0, x)
    if isinstance(x, tuple):
        return (1, tuple(sort_key(e) for e in x))
    if isinstance(x, Assignment):
        return (2, x.order_key())
    if isinstance(x, frozenset):
        return (3, tuple(sorted(sort_key(e) for e in x)))
    raise TypeError(f"unsupported identifier type: {type(x).__name__}")


def sorted_ids(items):
    return sorted(items, key=sort_key)


def render(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, tuple):
        return "(" + ",".join(render(e) for e in x) + ")"
    if isinstance(x, Assignment):
        return "[" + ",".join(f"{render(t)}={render(s)}" for t, s in x.items()) + "]"
    if isinstance(x, frozenset):
        return "{" + ",".join(render(e) for e in sorted_ids(x)) + "}"
    raise TypeError(f"unsupported identifier type: {type(x).__name__}")


class Assignment(Mapping):
    """Immutable partial map from clock instants to states.

    Iteration follows canonical instant order. Two assignments are equal when
    they define the same pairs; the empty assignment is the empty realization.
    """

    __slots__ = ("_data", "_items")

    def __init__(self, pairs=()):
        data = dict(pairs)
        self._data = data
        self._items = tuple(sorted(data.items(), key=lambda p: sort_key(p[0])))

    def __getitem__(self, t):
        return self._data[t]

    def __iter__(self):
        return (t for t, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._data == other._data
        return NotImplemented

    def __repr__(self):
        return render(self)

    def items(self):
        return self._items

    @property
    def domain(self):
        return frozenset(self._data)

    def order_key(self):
        # size first, then lexicographic on (instant, state) pairs
        return (len(self._items), tuple((sort_key(t), sort_key(s)) for t, s in self._items))

    def without(self, t):
        return Assignment((k, v) for k, v in self._items if k != t)

    def is_injective(self):
        return len(set(self._data.values())) == len(self._data)

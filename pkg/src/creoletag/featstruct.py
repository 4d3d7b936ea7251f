"""Flat feature structures over declared finite attribute domains.

A feature structure is a finite mapping from attribute names to value
cells.  A cell is either a non-empty subset of the attribute's domain or
a variable shared with other cells.  An absent attribute means "fully
underspecified": it behaves like the full domain, so the indefinite
degree of determination, for instance, is simply the absence of the
determination attributes.

Unification intersects subsets attribute by attribute and fails exactly
when some intersection comes out empty.  Sets with more than one member
are how material shared between dialects is written down: a determiner
carrying ``lan:{GP,MQ}`` belongs to Guadeloupean and Martinican alike
and narrows to one dialect only when the derivation forces it.

Structures are immutable values; every operation is pure.  Variable
bindings live in a separate :class:`Bindings` environment threaded by
the caller (one per derivation), never inside the structure itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import UndeclaredAttribute


@dataclass(frozen=True)
class AttributeDomain:
    """A named attribute together with its ordered finite value set."""

    name: str
    values: tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("domain %r has no values" % self.name)
        if len(set(self.values)) != len(self.values):
            raise ValueError("domain %r repeats a value" % self.name)


class Schema:
    """The set of declared attribute domains of one grammar."""

    def __init__(self, domains: Iterable[AttributeDomain]):
        self._domains: dict[str, AttributeDomain] = {}
        for dom in domains:
            if dom.name in self._domains:
                raise ValueError("attribute %r declared twice" % dom.name)
            self._domains[dom.name] = dom

    def __contains__(self, attr: str) -> bool:
        return attr in self._domains

    def __iter__(self):
        return iter(self._domains.values())

    def domain(self, attr: str) -> AttributeDomain:
        try:
            return self._domains[attr]
        except KeyError:
            raise UndeclaredAttribute("attribute %r is not declared" % attr) from None

    def full(self, attr: str) -> frozenset:
        return frozenset(self.domain(attr).values)

    def check(self, fs: "FeatureStruct") -> None:
        """Raise UndeclaredAttribute if fs mentions an unknown attribute."""
        for attr in fs:
            self.domain(attr)


@dataclass(frozen=True)
class Var:
    """A variable cell; all cells carrying the same Var share one value."""

    name: str

    def __repr__(self):
        return "$" + self.name


Cell = Union[frozenset, Var]


class Bindings:
    """Immutable variable environment: name -> subset or alias name."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Optional[dict] = None):
        self._map = dict(mapping) if mapping else {}

    def root(self, name: str) -> str:
        seen = name
        while isinstance(self._map.get(seen), str):
            seen = self._map[seen]
        return seen

    def value(self, var: Var) -> Optional[frozenset]:
        """The subset a variable is bound to, or None while unbound."""
        val = self._map.get(self.root(var.name))
        return val if isinstance(val, frozenset) else None

    def bind(self, name: str, value) -> "Bindings":
        new = dict(self._map)
        new[self.root(name)] = value
        return Bindings(new)

    def alias(self, name: str, other: str) -> "Bindings":
        new = dict(self._map)
        new[self.root(name)] = self.root(other)
        return Bindings(new)

    def __repr__(self):
        return "Bindings(%r)" % (self._map,)


class FeatureStruct(Mapping):
    """An immutable attribute -> cell mapping."""

    __slots__ = ("_items", "_hash")

    def __init__(self, bindings: Optional[Mapping] = None, **kw):
        merged = dict(bindings or {})
        merged.update(kw)
        items = []
        for attr, cell in sorted(merged.items()):
            if isinstance(cell, Var):
                items.append((attr, cell))
                continue
            subset = frozenset(cell)
            if not subset:
                raise ValueError("attribute %r bound to the empty set" % attr)
            items.append((attr, subset))
        object.__setattr__(self, "_items", tuple(items))
        object.__setattr__(self, "_hash", hash(self._items))

    def __getitem__(self, attr):
        for key, cell in self._items:
            if key == attr:
                return cell
        raise KeyError(attr)

    def __iter__(self):
        return (attr for attr, _ in self._items)

    def __len__(self):
        return len(self._items)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, FeatureStruct) and self._items == other._items

    def __repr__(self):
        if not self._items:
            return "FS{}"
        parts = []
        for attr, cell in self._items:
            if isinstance(cell, Var):
                parts.append("%s:%r" % (attr, cell))
            else:
                parts.append("%s:{%s}" % (attr, ",".join(sorted(cell))))
        return "FS{%s}" % ", ".join(parts)

    def resolve(self, env: Bindings) -> "FeatureStruct":
        """Substitute bound variables; unbound ones drop (underspecified)."""
        out = {}
        for attr, cell in self._items:
            if isinstance(cell, Var):
                val = env.value(cell)
                if val is not None:
                    out[attr] = val
            else:
                out[attr] = cell
        return FeatureStruct(out)

    def rename(self, mapping: Mapping[str, Var]) -> "FeatureStruct":
        """Replace variables according to mapping (fresh-renaming support)."""
        out = {}
        for attr, cell in self._items:
            if isinstance(cell, Var) and cell.name in mapping:
                out[attr] = mapping[cell.name]
            else:
                out[attr] = cell
        return FeatureStruct(out)

    def variables(self) -> set[str]:
        return {cell.name for _, cell in self._items if isinstance(cell, Var)}


FS = FeatureStruct

EMPTY = FeatureStruct()


def _meet_cells(a: Cell, b: Cell, env: Bindings):
    """Unify two cells.  Returns (cell, env) or None on empty meet."""
    a_var = isinstance(a, Var)
    b_var = isinstance(b, Var)
    if not a_var and not b_var:
        meet = a & b
        return (meet, env) if meet else None
    if a_var and b_var:
        ra, rb = env.root(a.name), env.root(b.name)
        if ra == rb:
            return a, env
        va, vb = env.value(a), env.value(b)
        env = env.alias(rb, ra)
        if va is not None and vb is not None:
            meet = va & vb
            if not meet:
                return None
            return a, env.bind(ra, meet)
        if vb is not None:
            return a, env.bind(ra, vb)
        return a, env
    if b_var:
        a, b = b, a  # now a is the variable, b the subset
    bound = env.value(a)
    if bound is None:
        return a, env.bind(a.name, b)
    meet = bound & b
    if not meet:
        return None
    return a, env.bind(a.name, meet)


def unify(a: FeatureStruct, b: FeatureStruct, schema: Schema,
          env: Optional[Bindings] = None):
    """Unify two feature structures.

    Returns ``(result, env)`` on success and ``None`` on failure.  The
    result binds every attribute present in either input; an attribute
    present on one side only is copied through (absent means the full
    domain, and intersecting with the full domain changes nothing).
    """
    schema.check(a)
    schema.check(b)
    env = env or Bindings()
    out = dict(a)
    for attr, cell in b.items():
        if attr not in out:
            out[attr] = cell
            continue
        met = _meet_cells(out[attr], cell, env)
        if met is None:
            return None
        out[attr], env = met
    return FeatureStruct(out), env


def subsumes(general: FeatureStruct, specific: FeatureStruct, schema: Schema,
             env: Optional[Bindings] = None) -> bool:
    """True iff every attribute bound in `general` covers `specific`'s value.

    An attribute absent from `specific` counts as the full domain, so it
    is only subsumed by a `general` binding that is itself the full domain.
    """
    schema.check(general)
    schema.check(specific)
    env = env or Bindings()

    def as_subset(fs, attr):
        if attr not in fs:
            return schema.full(attr)
        cell = fs[attr]
        if isinstance(cell, Var):
            bound = env.value(cell)
            return bound if bound is not None else schema.full(attr)
        return cell

    for attr in general:
        if not as_subset(specific, attr) <= as_subset(general, attr):
            return False
    return True


def erase_attribute(fs: FeatureStruct, attr: str) -> FeatureStruct:
    """Remove one attribute binding; erasing an absent attribute is identity."""
    if attr not in fs:
        return fs
    return FeatureStruct({k: v for k, v in fs.items() if k != attr})

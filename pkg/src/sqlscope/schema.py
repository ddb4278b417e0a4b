"""Attribute schema: typed, role-tagged column declarations.

A dataset column is one of four kinds. ``nominal`` values come from a finite
per-attribute dictionary, ``itemset`` cells are finite sets over such a
dictionary, ``numeric`` cells may be missing, ``boolean`` cells may not.
Roles separate what the pattern language may touch (descriptive) from the
scored variable (target) and carried-along context such as raw SQL (meta).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from sqlscope.errors import SchemaError, UnknownAttributeError

# Distinguished nominal dictionary value that encodes a missing cell.
MISSING_NOMINAL = "⟂"

TARGET_KINDS = ("nominal", "boolean", "numeric")


class Kind(str, Enum):
    NOMINAL = "nominal"
    NUMERIC = "numeric"
    BOOLEAN = "boolean"
    ITEMSET = "itemset"


class Role(str, Enum):
    DESCRIPTIVE = "descriptive"
    TARGET = "target"
    META = "meta"


@dataclass(frozen=True)
class Attribute:
    """Declaration of a single column: name, kind, role."""

    name: str
    kind: Kind
    role: Role = Role.DESCRIPTIVE

    def to_json(self) -> dict:
        return {"name": self.name, "kind": self.kind.value, "role": self.role.value}

    @staticmethod
    def from_json(obj: dict) -> "Attribute":
        try:
            return Attribute(str(obj["name"]), Kind(obj["kind"]), Role(obj["role"]))
        except (KeyError, ValueError) as exc:
            raise SchemaError(f"bad attribute declaration {obj!r}: {exc}") from exc


class Schema:
    """Ordered list of attribute declarations with unique names.

    At most one attribute carries the target role; its kind must be nominal,
    boolean, or numeric. Tables built for ingest may have no target at all --
    the target is assigned per discovery job (see ``DataTable.with_target``).
    """

    def __init__(self, attributes: list[Attribute] | tuple[Attribute, ...]):
        attributes = tuple(attributes)
        names = [a.name for a in attributes]
        if len(set(names)) != len(names):
            dupes = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate attribute names: {dupes}")
        targets = [a for a in attributes if a.role is Role.TARGET]
        if len(targets) > 1:
            raise SchemaError(f"more than one target attribute: {[a.name for a in targets]}")
        if targets and targets[0].kind is Kind.ITEMSET:
            raise SchemaError(f"target {targets[0].name!r} may not be an itemset")
        self._attributes = attributes
        self._index = {a.name: i for i, a in enumerate(attributes)}

    @property
    def attributes(self) -> tuple[Attribute, ...]:
        return self._attributes

    def __len__(self) -> int:
        return len(self._attributes)

    def __iter__(self):
        return iter(self._attributes)

    def __getitem__(self, i: int) -> Attribute:
        return self._attributes[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, Schema) and self._attributes == other._attributes

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownAttributeError(name) from None

    def attribute(self, name: str) -> Attribute:
        return self._attributes[self.index_of(name)]

    @property
    def target(self) -> Attribute | None:
        for a in self._attributes:
            if a.role is Role.TARGET:
                return a
        return None

    def descriptive_indices(self) -> list[int]:
        return [i for i, a in enumerate(self._attributes) if a.role is Role.DESCRIPTIVE]

    def with_target(self, name: str) -> "Schema":
        """Return a schema where ``name`` is the sole target attribute.

        A previous target (if any) is demoted to descriptive; meta attributes
        cannot become targets.
        """
        idx = self.index_of(name)
        chosen = self._attributes[idx]
        if chosen.role is Role.META:
            raise SchemaError(f"meta attribute {name!r} cannot be the target")
        if chosen.kind is Kind.ITEMSET:
            raise SchemaError(f"itemset attribute {name!r} cannot be the target")
        attrs = []
        for i, a in enumerate(self._attributes):
            if i == idx:
                attrs.append(replace(a, role=Role.TARGET))
            elif a.role is Role.TARGET:
                attrs.append(replace(a, role=Role.DESCRIPTIVE))
            else:
                attrs.append(a)
        return Schema(attrs)

    def to_json(self) -> list[dict]:
        return [a.to_json() for a in self._attributes]

    @staticmethod
    def from_json(obj: list) -> "Schema":
        if not isinstance(obj, list):
            raise SchemaError("schema sidecar must be a JSON array of attribute declarations")
        return Schema([Attribute.from_json(o) for o in obj])

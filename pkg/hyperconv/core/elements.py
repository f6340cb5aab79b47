"""
Carrier elements

Plain ints stand for elements of Z+ and Z, tuples of ints for pairs.
Finite tables use TableElement; orbit, coset, double-coset and quotient
spaces use frozen label classes holding the sorted member tuple.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple, Type, Union

from .errors import SpecError

Element = Any


@dataclass(frozen=True)
class TableElement:
    """An element of a finite multiplication table, ordered by its row index"""
    index: int
    name: str

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class OrbitLabel:
    """An orbit x^H, stored as its members in canonical order

    The representative is always the smallest member, so equal orbits
    produce equal labels whatever element they were built from.
    """
    members: Tuple[Element, ...]

    @classmethod
    def of(cls, members: Iterable[Element]):
        unique = sorted(set(members), key=element_key)
        if not unique:
            raise ValueError(f"Invalid {cls.__name__}: member set must be non-empty")
        return cls(tuple(unique))

    @property
    def representative(self) -> Element:
        return self.members[0]

    def __contains__(self, x: Element) -> bool:
        return x in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __repr__(self) -> str:
        inner = ",".join(repr(m) for m in self.members)
        return f"{{{inner}}}"


class CosetLabel(OrbitLabel):
    """A left coset xH"""


class DoubleCosetLabel(OrbitLabel):
    """A double coset HxH"""


class QuotientLabel(OrbitLabel):
    """A coset xH of a central subgroup in a commutative hypergroup"""


_LABEL_RANKS: Dict[Type[OrbitLabel], Tuple[int, str]] = {
    OrbitLabel: (4, "orbit"),
    CosetLabel: (5, "coset"),
    DoubleCosetLabel: (6, "double_coset"),
    QuotientLabel: (7, "quotient"),
}
_LABELS_BY_TAG = {tag: cls for cls, (_, tag) in _LABEL_RANKS.items()}


def element_key(x: Element) -> Tuple:
    """Canonical total order key: numeric, then lexicographic pairs, then tables, then labels"""
    if isinstance(x, bool):
        raise TypeError(f"booleans are not carrier elements: {x!r}")
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, tuple):
        return (1, tuple(element_key(c) for c in x))
    if isinstance(x, TableElement):
        return (2, x.index, x.name)
    if isinstance(x, str):
        return (3, x)
    if isinstance(x, OrbitLabel):
        rank, _ = _LABEL_RANKS[type(x)]
        return (rank, tuple(element_key(m) for m in x.members))
    raise TypeError(f"unsupported carrier element: {x!r}")


def sort_elements(xs: Iterable[Element]) -> list:
    return sorted(xs, key=element_key)


def element_to_json(x: Element) -> Union[int, list, dict, str]:
    if isinstance(x, bool):
        raise TypeError(f"booleans are not carrier elements: {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, tuple):
        return [element_to_json(c) for c in x]
    if isinstance(x, TableElement):
        return {"table": x.name, "index": x.index}
    if isinstance(x, str):
        return x
    if isinstance(x, OrbitLabel):
        _, tag = _LABEL_RANKS[type(x)]
        return {tag: [element_to_json(m) for m in x.members]}
    raise TypeError(f"unsupported carrier element: {x!r}")


def element_from_json(data: Any) -> Element:
    if isinstance(data, bool):
        raise SpecError(f"Invalid element: {data!r}")
    if isinstance(data, int):
        return data
    if isinstance(data, str):
        return data
    if isinstance(data, list):
        return tuple(element_from_json(c) for c in data)
    if isinstance(data, dict):
        if "table" in data:
            return TableElement(int(data.get("index", 0)), str(data["table"]))
        for tag, cls in _LABELS_BY_TAG.items():
            if tag in data:
                return cls.of(element_from_json(m) for m in data[tag])
    raise SpecError(f"Invalid element: {data!r} is not an int, pair, table element or label")

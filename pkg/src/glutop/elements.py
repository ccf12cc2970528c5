"""Canonical handling of set elements.

Elements are strings or nested tuples of elements. They are hashable and are
ordered by a canonical key so every enumeration in the package is
deterministic. Conversion to flat string tags happens only at the JSON
boundary (see :func:`show`).
"""

from __future__ import annotations

import json
from functools import lru_cache
from typing import Any, Iterable

Element = Any

_ESCAPE = str.maketrans({"\\": "\\\\", "(": "\\(", ")": "\\)", ",": "\\,"})


@lru_cache(maxsize=1 << 18)
def ekey(e: Element) -> str:
    """Total order key: JSON text of the nested structure."""
    return json.dumps(e, ensure_ascii=False, separators=(",", ":"))


def sort_elems(elems: Iterable[Element]) -> tuple:
    """Deduplicate and sort by canonical key."""
    return tuple(sorted(set(elems), key=ekey))


def show(e: Element) -> str:
    """Injective string rendering of an element.

    Atoms containing structural characters are backslash escaped, so an atom
    never collides with a rendered tuple.
    """
    if isinstance(e, str):
        return e.translate(_ESCAPE)
    return "(" + ",".join(show(x) for x in e) + ")"


def freeze(x: Any) -> Element:
    """Turn JSON-ish nested lists into nested tuples."""
    if isinstance(x, list):
        return tuple(freeze(y) for y in x)
    if isinstance(x, (int, float, bool)):
        return str(x)
    return x

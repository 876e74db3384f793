"""Loading of JSON/YAML documents with source line tracking.

YAML is a superset of JSON, so composing the document with PyYAML gives
node marks for every mapping and sequence. Those marks let the parsers
raise errors that point at the offending line.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import yaml

from .errors import ParseError


class LineDict(dict):
    """dict that remembers the line of itself and of each key (1-based)."""

    line: int = 0
    key_lines: dict

    def line_of(self, key: str) -> int:
        return self.key_lines.get(key, self.line)


class LineList(list):
    line: int = 0
    item_lines: list


def _construct(node: yaml.Node, loader: yaml.SafeLoader) -> Any:
    if isinstance(node, yaml.MappingNode):
        out = LineDict()
        out.line = node.start_mark.line + 1
        out.key_lines = {}
        for key_node, value_node in node.value:
            key = loader.construct_object(key_node, deep=True)
            out[key] = _construct(value_node, loader)
            out.key_lines[key] = key_node.start_mark.line + 1
        return out
    if isinstance(node, yaml.SequenceNode):
        out = LineList(_construct(item, loader) for item in node.value)
        out.line = node.start_mark.line + 1
        out.item_lines = [item.start_mark.line + 1 for item in node.value]
        return out
    return loader.construct_object(node, deep=True)


def load_text(text: str, source: str = "<string>") -> Any:
    loader = yaml.SafeLoader(text)
    try:
        node = loader.get_single_node()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark is not None else None
        raise ParseError(f"malformed document: {exc.problem or exc}", source, line) from None
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed document: {exc}", source) from None
    finally:
        loader.dispose()
    if node is None:
        raise ParseError("empty document", source, 1)
    return _construct(node, yaml.SafeLoader(""))


def load_file(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read file ({exc.strerror})", str(path)) from None
    return load_text(text, str(path))


def line_of(obj: Any, default: int | None = None) -> int | None:
    return getattr(obj, "line", default)

"""Read and write constraint networks as JSON instance documents.

A document carries a format tag, named variables with ordered value lists,
constraint tables written over value names, and optional free-form metadata.
Parsing maps value names to dense integers in declared order; serialization
names values by their decimal spelling, so networks built by this toolkit
(whose domains are ``0..k-1``) round-trip to compare-equal documents.
"""

from __future__ import annotations

import json
import os
from typing import Optional

from .network import ConstraintNetwork, NetworkError, bit_values, build_network

FORMAT = "cspkit-instance/1"

_TOP_KEYS = {"format", "variables", "constraints", "metadata"}
_VAR_KEYS = {"name", "values", "removed"}
_CON_KEYS = {"scope", "polarity", "rows"}


class InstanceError(Exception):
    """A malformed instance document (syntax or semantics)."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None):
        if line is not None:
            message = f"line {line}, column {column}: {message}"
        super().__init__(message)
        self.line = line
        self.column = column


def network_to_data(net: ConstraintNetwork, metadata: Optional[dict] = None) -> dict:
    """Serialize a network into a plain JSON-ready document."""
    variables = []
    for x, d in enumerate(net.domains):
        entry: dict = {"name": f"x{x}", "values": [str(v) for v in d.initial]}
        removed = [str(v) for v in bit_values(d.initial_mask & ~d.mask)]
        if removed:
            entry["removed"] = removed
        variables.append(entry)
    constraints = []
    for c in net.constraints:
        constraints.append({
            "scope": [f"x{x}" for x in c.scope],
            "polarity": c.polarity,
            "rows": [[str(v) for v in row] for row in c.stored_rows()],
        })
    data = {"format": FORMAT, "variables": variables, "constraints": constraints}
    if metadata:
        data["metadata"] = metadata
    return data


def _reject_unknown(keys, allowed, where: str, strict: bool):
    if strict:
        unknown = sorted(set(keys) - allowed)
        if unknown:
            raise InstanceError(f"{where}: unknown field {unknown[0]!r}")


def network_from_data(data, *, strict: bool = True) -> ConstraintNetwork:
    """Build a network from a parsed document; see module docstring."""
    if not isinstance(data, dict):
        raise InstanceError("document must be a JSON object")
    _reject_unknown(data.keys(), _TOP_KEYS, "document", strict)
    if data.get("format") != FORMAT:
        raise InstanceError(f"unsupported format tag {data.get('format')!r} "
                            f"(expected {FORMAT!r})")
    var_entries = data.get("variables")
    if not isinstance(var_entries, list) or not var_entries:
        raise InstanceError("document needs a non-empty 'variables' list")

    index_of: dict = {}          # variable name -> dense id
    value_maps: list[dict] = []  # per variable: value name -> dense value
    removed: list[tuple[int, int]] = []
    for i, entry in enumerate(var_entries):
        if not isinstance(entry, dict):
            raise InstanceError(f"variable {i}: entry must be an object")
        _reject_unknown(entry.keys(), _VAR_KEYS, f"variable {i}", strict)
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise InstanceError(f"variable {i}: missing or empty 'name'")
        if name in index_of:
            raise InstanceError(f"variable {i}: duplicate name {name!r}")
        values = entry.get("values")
        if not isinstance(values, list) or not values:
            raise InstanceError(f"variable {name!r}: needs a non-empty "
                                "'values' list")
        vmap: dict = {}
        for v in values:
            if not isinstance(v, (str, int)) or isinstance(v, bool):
                raise InstanceError(f"variable {name!r}: value names must be "
                                    "strings or integers")
            if v in vmap:
                raise InstanceError(f"variable {name!r}: duplicate value {v!r}")
            vmap[v] = len(vmap)
        index_of[name] = i
        value_maps.append(vmap)
        for v in entry.get("removed", ()):
            if v not in vmap:
                raise InstanceError(f"variable {name!r}: removed value {v!r} "
                                    "is not declared")
            removed.append((i, vmap[v]))

    specs = []
    for i, entry in enumerate(data.get("constraints", ())):
        if not isinstance(entry, dict):
            raise InstanceError(f"constraint {i}: entry must be an object")
        _reject_unknown(entry.keys(), _CON_KEYS, f"constraint {i}", strict)
        scope_names = entry.get("scope")
        if not isinstance(scope_names, list) or not scope_names:
            raise InstanceError(f"constraint {i}: needs a non-empty 'scope'")
        scope = []
        for name in scope_names:
            if name not in index_of:
                raise InstanceError(f"constraint {i}: unknown variable {name!r}")
            scope.append(index_of[name])
        if len(set(scope)) != len(scope):
            raise InstanceError(f"constraint {i}: scope repeats a variable")
        polarity = entry.get("polarity")
        if polarity not in ("supports", "conflicts"):
            raise InstanceError(f"constraint {i}: polarity must be 'supports' "
                                f"or 'conflicts', got {polarity!r}")
        rows = entry.get("rows")
        if not isinstance(rows, list):
            raise InstanceError(f"constraint {i}: needs a 'rows' list")
        table = set()
        for row in rows:
            if not isinstance(row, list) or len(row) != len(scope):
                raise InstanceError(f"constraint {i}: row {row!r} does not "
                                    f"match the scope arity {len(scope)}")
            mapped = []
            for x, v in zip(scope, row):
                vmap = value_maps[x]
                if v not in vmap:
                    raise InstanceError(
                        f"constraint {i}: value {v!r} is not declared for "
                        f"variable {var_entries[x]['name']!r}")
                mapped.append(vmap[v])
            table.add(tuple(mapped))
        specs.append((tuple(scope), polarity, table))

    try:
        net = build_network([len(m) for m in value_maps], specs)
    except NetworkError as exc:
        raise InstanceError(str(exc)) from exc
    for x, v in removed:
        net.remove_value(x, v)
    return net


def dumps_network(net: ConstraintNetwork, metadata: Optional[dict] = None) -> str:
    return json.dumps(network_to_data(net, metadata), indent=1)


def loads_network(text: str, *, strict: bool = True) -> ConstraintNetwork:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"syntax error: {exc.msg}",
                            line=exc.lineno, column=exc.colno) from exc
    return network_from_data(data, strict=strict)


def save_network(path, net: ConstraintNetwork,
                 metadata: Optional[dict] = None) -> None:
    """Write atomically: the file appears complete or not at all."""
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(dumps_network(net, metadata))
        fh.write("\n")
    os.replace(tmp, path)


def load_network(path, *, strict: bool = True) -> ConstraintNetwork:
    with open(path, encoding="utf-8") as fh:
        return loads_network(fh.read(), strict=strict)

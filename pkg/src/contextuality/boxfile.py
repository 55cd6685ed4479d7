"""Box spec files: a strict JSON document with three sections.

    {
      "observables":   [{"name": "A1", "cardinality": 2}, ...],
      "contexts":      [["A1", "A2"], ...],
      "distributions": [[0.5, 0.0, 0.0, 0.5], ...]
    }

Distributions are listed per context in the canonical row-major order
(first-listed observable most significant).  Unknown keys are rejected;
probability literals round-trip exactly (json emits shortest repr, <= 17
significant digits).
"""

from __future__ import annotations

import json
from pathlib import Path

from .boxes import Box, Hypergraph, probability_vector, require_valid
from .errors import BoxFileError


def _reject_unknown_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise BoxFileError(f"{where}: unknown keys {sorted(unknown)}")


def box_to_document(box: Box) -> dict:
    require_valid(box)
    g = box.hypergraph
    return {
        "observables": [
            {"name": name, "cardinality": card} for name, card in g.observables
        ],
        "contexts": [[g.names[i] for i in ctx] for ctx in g.contexts],
        "distributions": [[float(x) for x in d] for d in box.distributions],
    }


def box_from_document(doc) -> Box:
    if not isinstance(doc, dict):
        raise BoxFileError("box document must be a JSON object")
    _reject_unknown_keys(doc, {"observables", "contexts", "distributions"}, "document")
    for key in ("observables", "contexts", "distributions"):
        if key not in doc:
            raise BoxFileError(f"document: missing section {key!r}")
        if not isinstance(doc[key], list):
            raise BoxFileError(f"section {key!r} must be a list")

    observables = []
    for j, entry in enumerate(doc["observables"]):
        if not isinstance(entry, dict):
            raise BoxFileError(f"observables[{j}] must be an object")
        _reject_unknown_keys(entry, {"name", "cardinality"}, f"observables[{j}]")
        if "name" not in entry or "cardinality" not in entry:
            raise BoxFileError(f"observables[{j}]: need 'name' and 'cardinality'")
        name, card = entry["name"], entry["cardinality"]
        if not isinstance(name, str) or not isinstance(card, int) or isinstance(card, bool):
            raise BoxFileError(f"observables[{j}]: name must be a string, cardinality an int")
        observables.append((name, card))
    name_index = {name: i for i, (name, _) in enumerate(observables)}
    if len(name_index) != len(observables):
        raise BoxFileError("duplicate observable names")

    contexts = []
    for j, ctx in enumerate(doc["contexts"]):
        if not isinstance(ctx, list) or not all(isinstance(x, str) for x in ctx):
            raise BoxFileError(f"contexts[{j}] must be a list of observable names")
        try:
            contexts.append(tuple(name_index[x] for x in ctx))
        except KeyError as exc:
            raise BoxFileError(f"contexts[{j}]: unknown observable {exc.args[0]!r}") from None

    try:
        g = Hypergraph(observables, contexts)
    except Exception as exc:
        raise BoxFileError(f"invalid hypergraph: {exc}") from exc

    dists = doc["distributions"]
    if len(dists) != g.n_contexts:
        raise BoxFileError(
            f"{len(dists)} distributions for {g.n_contexts} contexts"
        )
    vectors = []
    for j, entries in enumerate(dists):
        if not isinstance(entries, list) or not all(
            isinstance(x, (int, float)) and not isinstance(x, bool) for x in entries
        ):
            raise BoxFileError(f"distributions[{j}] must be a list of numbers")
        if len(entries) != g.context_dim(j):
            raise BoxFileError(
                f"distributions[{j}] has {len(entries)} entries, "
                f"expected {g.context_dim(j)}"
            )
        try:
            vectors.append(probability_vector(entries, what=f"distributions[{j}]"))
        except Exception as exc:
            raise BoxFileError(str(exc)) from exc
    return Box(g, vectors)


def parse_box(path: str | Path) -> Box:
    """Read and validate a box spec file; raises BoxFileError with diagnostics."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BoxFileError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    try:
        return box_from_document(doc)
    except BoxFileError as exc:
        raise BoxFileError(f"{path}: {exc}") from exc


def emit_box(box: Box, path: str | Path) -> None:
    """Write a box spec file that parses back to the same box exactly."""
    Path(path).write_text(json.dumps(box_to_document(box), indent=2) + "\n")

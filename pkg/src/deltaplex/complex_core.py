"""Immutable Delta-complex data model: validation, subdivision, bookkeeping.

A cell of dimension k >= 1 carries an ordered sequence of k+1 facet
identifiers; ``facets[i]`` is the face obtained by deleting vertex i.
Vertices (dimension 0) have no facets.  A complex is valid when every
facet pointer resolves to a cell of one lower dimension and the facet
maps satisfy the simplicial identities

    face_i(face_j(c)) == face_{j-1}(face_i(c))   for i < j.

Cells may repeat facets and vertices, so complexes like the circle with
one vertex and one edge are representable.  A complex is *regular* when
every cell has dim+1 distinct vertices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Optional, Sequence

__all__ = [
    "Cell",
    "DeltaComplex",
    "ValidationReport",
    "Violation",
    "ComplexError",
    "ValidationError",
    "DuplicateCellIdError",
    "DanglingFacetError",
    "DimensionMismatchError",
    "FaceIdentityError",
    "EmptyComplexError",
    "NotConnectedError",
    "build_complex",
    "validate_cells",
    "euler_characteristic",
    "f_vector",
    "connected_components",
    "subcomplex",
    "barycentric_subdivision",
    "iterated_face",
    "to_json",
    "from_json",
]


@dataclass(frozen=True)
class Cell:
    """One cell.  ``facets`` is ordered; entry i is the i-th facet id."""

    id: str
    dim: int
    facets: tuple[str, ...] = ()
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("cell id must be a non-empty string")
        object.__setattr__(self, "facets", tuple(self.facets))


class ComplexError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ComplexError, ValueError):
    """A set of raw cells failed structural validation.

    Carries the full :class:`ValidationReport` so callers can inspect
    every violation, not just the first one.
    """

    def __init__(self, message: str, report: "ValidationReport"):
        super().__init__(message)
        self.report = report


class DuplicateCellIdError(ValidationError):
    pass


class DanglingFacetError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class FaceIdentityError(ValidationError):
    pass


class EmptyComplexError(ComplexError, ValueError):
    """An operation that needs at least one cell got the empty complex."""


class NotConnectedError(ComplexError, ValueError):
    """An operation that needs a connected complex got a disconnected one."""


@dataclass(frozen=True)
class Violation:
    """One validation failure: which cell, which rule, human detail."""

    cell_id: str
    rule: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


# rule name -> exception class for the first reported violation
_RULE_ERRORS = {
    "duplicate-id": DuplicateCellIdError,
    "dangling-facet": DanglingFacetError,
    "dimension-mismatch": DimensionMismatchError,
    "face-identity": FaceIdentityError,
}


class DeltaComplex:
    """A validated, immutable Delta-complex.

    Construct through :func:`build_complex`; direct construction skips
    validation and is reserved for internal use on already-checked data.
    Cells are exposed as a read-only mapping id -> Cell, plus per
    dimension id tuples sorted lexicographically (the deterministic
    ordering used for boundary matrices and serialization).
    """

    __slots__ = ("_cells", "_by_dim", "_vertices", "_regular", "__weakref__")

    def __init__(
        self,
        cells: Mapping[str, Cell],
        by_dim: tuple[tuple[str, ...], ...],
        vertices: Mapping[str, tuple[str, ...]],
        regular: bool,
    ):
        self._cells = dict(cells)
        self._by_dim = by_dim
        self._vertices = dict(vertices)
        self._regular = regular

    @property
    def cells(self) -> Mapping[str, Cell]:
        return MappingProxyType(self._cells)

    @property
    def dimension(self) -> int:
        """Largest cell dimension present; -1 for the empty complex."""
        return len(self._by_dim) - 1

    @property
    def regular(self) -> bool:
        """True when every cell has dim+1 distinct vertices."""
        return self._regular

    def ids_of_dim(self, k: int) -> tuple[str, ...]:
        if 0 <= k < len(self._by_dim):
            return self._by_dim[k]
        return ()

    def cells_of_dim(self, k: int) -> tuple[Cell, ...]:
        return tuple(self._cells[i] for i in self.ids_of_dim(k))

    def cell(self, cell_id: str) -> Cell:
        return self._cells[cell_id]

    def vertex_tuple(self, cell_id: str) -> tuple[str, ...]:
        """Ordered vertex ids of a cell (entries repeat on irregular cells)."""
        return self._vertices[cell_id]

    def __contains__(self, cell_id: str) -> bool:
        return cell_id in self._cells

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self) -> Iterator[Cell]:
        for ids in self._by_dim:
            for i in ids:
                yield self._cells[i]

    def __repr__(self) -> str:
        fv = ",".join(str(n) for n in f_vector(self))
        return f"DeltaComplex(f=({fv}), regular={self._regular})"


def validate_cells(raw_cells: Iterable[Cell]) -> ValidationReport:
    """Check raw cells against the structural rules, raising nothing.

    Rules checked, in order: duplicate ids, facet counts, dangling facet
    pointers, facet dimensions, and the simplicial face identities for
    every cell of dimension >= 2.
    """
    violations: list[Violation] = []
    cells: dict[str, Cell] = {}
    for c in raw_cells:
        if c.id in cells:
            violations.append(Violation(c.id, "duplicate-id", "cell id appears more than once"))
        else:
            cells[c.id] = c

    for c in cells.values():
        if c.dim < 0:
            violations.append(Violation(c.id, "dimension-mismatch", f"negative dimension {c.dim}"))
            continue
        expected = 0 if c.dim == 0 else c.dim + 1
        if len(c.facets) != expected:
            violations.append(
                Violation(
                    c.id,
                    "dimension-mismatch",
                    f"dimension {c.dim} cell has {len(c.facets)} facets, expected {expected}",
                )
            )
            continue
        for i, f in enumerate(c.facets):
            if f not in cells:
                violations.append(Violation(c.id, "dangling-facet", f"facet {i} points to unknown cell {f!r}"))
            elif cells[f].dim != c.dim - 1:
                violations.append(
                    Violation(
                        c.id,
                        "dimension-mismatch",
                        f"facet {i} has dimension {cells[f].dim}, expected {c.dim - 1}",
                    )
                )

    if violations:
        return ValidationReport(tuple(violations))

    # face identities: face_i(face_j(c)) == face_{j-1}(face_i(c)) for i < j
    for c in cells.values():
        if c.dim < 2:
            continue
        for j in range(1, c.dim + 1):
            for i in range(j):
                left = cells[c.facets[j]].facets[i]
                right = cells[c.facets[i]].facets[j - 1]
                if left != right:
                    violations.append(
                        Violation(
                            c.id,
                            "face-identity",
                            f"face_{i}(face_{j}) = {left!r} but face_{j-1}(face_{i}) = {right!r}",
                        )
                    )
    return ValidationReport(tuple(violations))


def _vertex_tuples(cells: Mapping[str, Cell], by_dim: Sequence[Sequence[str]]) -> dict[str, tuple[str, ...]]:
    # vertex j of c is obtained by deleting every other index; with the
    # face identities holding, one route suffices:
    #   verts(c) = (verts(face_1(c))[0],) + verts(face_0(c))
    verts: dict[str, tuple[str, ...]] = {}
    for k, ids in enumerate(by_dim):
        for i in ids:
            c = cells[i]
            if k == 0:
                verts[i] = (i,)
            else:
                verts[i] = (verts[c.facets[1]][0],) + verts[c.facets[0]]
    return verts


def build_complex(raw_cells: Iterable[Cell]) -> DeltaComplex:
    """Validate raw cells and assemble a :class:`DeltaComplex`.

    Raises the subclass of :class:`ValidationError` matching the first
    violation (in deterministic order); the exception carries the full
    report.  The empty cell set builds the empty complex (dimension -1).
    """
    raw = list(raw_cells)
    report = validate_cells(raw)
    if not report.ok:
        first = report.violations[0]
        err = _RULE_ERRORS[first.rule]
        raise err(f"cell {first.cell_id!r}: {first.detail}", report)

    cells = {c.id: c for c in raw}
    top = max((c.dim for c in cells.values()), default=-1)
    by_dim = tuple(
        tuple(sorted(i for i, c in cells.items() if c.dim == k)) for k in range(top + 1)
    )
    verts = _vertex_tuples(cells, by_dim)
    regular = all(len(set(v)) == len(v) for v in verts.values())
    return DeltaComplex(cells, by_dim, verts, regular)


def f_vector(x: DeltaComplex) -> tuple[int, ...]:
    """Cell counts per dimension, () for the empty complex."""
    return tuple(len(x.ids_of_dim(k)) for k in range(x.dimension + 1))


def euler_characteristic(x: DeltaComplex) -> int:
    return sum((-1) ** k * n for k, n in enumerate(f_vector(x)))


def connected_components(x: DeltaComplex) -> tuple[frozenset[str], ...]:
    """Partition of cell ids under the facet-incidence relation.

    Components are closed under taking facets.  Returned sorted by their
    smallest cell id so the output is deterministic.  The empty complex
    has no components.
    """
    parent: dict[str, str] = {i: i for i in x.cells}

    def find(a: str) -> str:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: str, b: str) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for c in x.cells.values():
        for f in c.facets:
            union(c.id, f)

    groups: dict[str, set[str]] = {}
    for i in x.cells:
        groups.setdefault(find(i), set()).add(i)
    return tuple(sorted((frozenset(g) for g in groups.values()), key=min))


def subcomplex(x: DeltaComplex, ids: Iterable[str]) -> DeltaComplex:
    """The subcomplex on a facet-closed subset of cells.

    Raises ValueError if the subset is not closed under facets or names
    an unknown cell.
    """
    wanted = set(ids)
    for i in wanted:
        if i not in x:
            raise ValueError(f"unknown cell id {i!r}")
    for i in wanted:
        for f in x.cell(i).facets:
            if f not in wanted:
                raise ValueError(f"subset not facet-closed: {i!r} needs {f!r}")
    return build_complex([x.cell(i) for i in sorted(wanted)])


def iterated_face(x: DeltaComplex, cell_id: str, deleted: Iterable[int]) -> str:
    """Apply facet maps deleting the given vertex positions of a cell.

    Positions refer to the original cell; they are applied highest
    first so lower positions keep their meaning.
    """
    cur = cell_id
    for pos in sorted(set(deleted), reverse=True):
        cur = x.cell(cur).facets[pos]
    return cur


# ---------------------------------------------------------------------------
# barycentric subdivision


def _chains_to_full(k: int) -> list[tuple[frozenset[int], ...]]:
    # all strictly increasing chains of nonempty subsets of {0..k} whose
    # top element is the full set
    full = frozenset(range(k + 1))
    out: list[tuple[frozenset[int], ...]] = []

    def grow(chain: tuple[frozenset[int], ...]) -> None:
        out.append(chain)
        bottom = chain[0]
        if len(bottom) == 1:
            return
        # proper nonempty subsets of the current bottom, appended in front
        elems = sorted(bottom)
        n = len(elems)
        for mask in range(1, (1 << n) - 1):
            sub = frozenset(elems[i] for i in range(n) if mask >> i & 1)
            grow((sub,) + chain)

    grow((full,))
    return out


def _sd_id(base: str, chain: Sequence[frozenset[int]]) -> str:
    return base + "#" + "|".join(",".join(str(p) for p in sorted(v)) for v in chain)


def _sd_cells(x: DeltaComplex) -> list[tuple[Cell, str, tuple[frozenset[int], ...]]]:
    out = []
    for base in x.cells.values():
        for chain in _chains_to_full(base.dim):
            out.append((base, _sd_id(base.id, chain), chain))
    return out


def _sd_facet(
    x: DeltaComplex, base: Cell, chain: tuple[frozenset[int], ...], drop: int
) -> str:
    # facet `drop` of the subdivision cell (base, chain)
    p = len(chain) - 1
    if drop < p:
        return _sd_id(base.id, chain[:drop] + chain[drop + 1 :])
    # dropping the full set: renormalize onto the face spanned by the new top
    top = chain[p - 1]
    keep = sorted(top)
    delta = iterated_face(x, base.id, set(range(base.dim + 1)) - top)
    reindex = {pos: new for new, pos in enumerate(keep)}
    new_chain = tuple(frozenset(reindex[q] for q in v) for v in chain[:p])
    return _sd_id(delta, new_chain)


def barycentric_subdivision(x: DeltaComplex) -> DeltaComplex:
    """First barycentric subdivision.

    Cells are flags over a base cell: strictly increasing chains of
    vertex-position subsets ending at the full set, so every cell of the
    output lies over the unique base cell whose interior it subdivides.
    Vertices of the output correspond to cells of the input.  The output
    is always regular: the chain members have distinct sizes, so the
    barycenter vertices of any flag are distinct.
    """
    new_cells = []
    for base, sid, chain in _sd_cells(x):
        k = len(chain) - 1
        facets = tuple(_sd_facet(x, base, chain, i) for i in range(k + 1)) if k else ()
        new_cells.append(Cell(sid, k, facets, label=base.label))
    return build_complex(new_cells)


def _barycentric_with_chart(
    x: DeltaComplex,
) -> tuple[DeltaComplex, dict[str, tuple[str, tuple[frozenset[int], ...]]]]:
    """Subdivision plus the chart sd-cell id -> (base id, chain).

    Internal: group actions need the flag structure to transport maps
    through the subdivision.
    """
    sd = barycentric_subdivision(x)
    chart = {sid: (base.id, chain) for base, sid, chain in _sd_cells(x)}
    return sd, chart


# ---------------------------------------------------------------------------
# interchange JSON

_SCHEMA_HINT = 'expected {"cells": [{"id", "dim", "facets", "label"?}, ...]}'


def to_json(x: DeltaComplex, *, meta: Optional[Mapping[str, object]] = None) -> str:
    """Serialize to interchange JSON, cells sorted by (dim, id).

    ``meta`` adds an optional informational block that parsers ignore.
    Output is deterministic byte-for-byte for a given complex.
    """
    cells = []
    for k in range(x.dimension + 1):
        for c in x.cells_of_dim(k):
            entry: dict[str, object] = {"id": c.id, "dim": c.dim, "facets": list(c.facets)}
            if c.label is not None:
                entry["label"] = c.label
            cells.append(entry)
    doc: dict[str, object] = {"cells": cells}
    if meta is not None:
        doc["meta"] = dict(meta)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> DeltaComplex:
    """Parse interchange JSON and validate.  Unknown top-level keys are ignored."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict) or "cells" not in doc:
        raise ValueError(_SCHEMA_HINT)
    raw = doc["cells"]
    if not isinstance(raw, list):
        raise ValueError(_SCHEMA_HINT)
    cells = []
    for entry in raw:
        if not isinstance(entry, dict) or "id" not in entry or "dim" not in entry:
            raise ValueError(_SCHEMA_HINT)
        facets = entry.get("facets", [])
        if (
            not isinstance(entry["id"], str)
            or not isinstance(entry["dim"], int)
            or not isinstance(facets, list)
            or not all(isinstance(f, str) for f in facets)
        ):
            raise ValueError(_SCHEMA_HINT)
        label = entry.get("label")
        if label is not None and not isinstance(label, str):
            raise ValueError(_SCHEMA_HINT)
        cells.append(Cell(entry["id"], entry["dim"], tuple(facets), label))
    return build_complex(cells)

"""Finite simplicial group actions: validation, quotients, covers.

Actions are given by named generators, each a cell bijection commuting
with the facet maps, plus declared relation words.  The whole group is
recovered by closing the generators under composition, which is always
finite on a finite complex (a configurable bound guards against
pathological inputs).

An action is *regular* when the stabilizer of every cell fixes it
pointwise.  Quotients of regular actions are again Delta-complexes;
non-regular actions become regular after at most two barycentric
subdivisions, and the subdivision transport is implemented here.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .complex_core import (
    Cell,
    ComplexError,
    DeltaComplex,
    ValidationReport,
    Violation,
    _barycentric_with_chart,
    build_complex,
    iterated_face,
)
from .pseudo_manifold import (
    CLOSED_PSEUDO_MANIFOLD,
    NotClosedError,
    _incidences,
    classify,
    is_orientable,
    orientation_assignment,
)

__all__ = [
    "CellMap",
    "SimplicialAction",
    "DoubleCover",
    "ActionError",
    "NotBijectiveError",
    "FacetIncompatibleError",
    "RelationViolatedError",
    "InfiniteClosureError",
    "NotRegularActionError",
    "NotOrientableError",
    "AmbiguousVertexMatchError",
    "validate_action",
    "regularize",
    "quotient",
    "orientation_character",
    "orientation_double_cover",
    "is_strict_isomorphism",
    "action_to_json",
    "action_from_json",
    "cover_to_json",
]

DEFAULT_CLOSURE_BOUND = 20000


class ActionError(ComplexError, ValueError):
    pass


class NotBijectiveError(ActionError):
    pass


class FacetIncompatibleError(ActionError):
    pass


class RelationViolatedError(ActionError):
    pass


class InfiniteClosureError(ActionError):
    pass


class NotRegularActionError(ActionError):
    pass


class NotOrientableError(ActionError):
    pass


class AmbiguousVertexMatchError(ActionError):
    """A cell map cannot be transported because vertex matching is ambiguous.

    Happens only on irregular cells (repeated vertices); one barycentric
    subdivision of the complex removes the ambiguity.
    """


@dataclass(frozen=True, eq=False)
class CellMap:
    """A dimension-preserving map of complexes given on cell ids."""

    source: DeltaComplex
    target: DeltaComplex
    assignment: Mapping[str, str]

    def apply(self, cell_id: str) -> str:
        return self.assignment[cell_id]

    def is_identity(self) -> bool:
        return self.source is self.target and all(k == v for k, v in self.assignment.items())


class SimplicialAction:
    """A finite group acting on a complex through named generator maps."""

    def __init__(
        self,
        complex: DeltaComplex,
        generators: Mapping[str, CellMap],
        relations: Sequence[Sequence[str]] = (),
    ):
        self.complex = complex
        self.generators = dict(generators)
        self.relations = tuple(tuple(w) for w in relations)
        self._closure: Optional[tuple[dict[str, str], ...]] = None

    def closure(self, bound: int = DEFAULT_CLOSURE_BOUND) -> tuple[dict[str, str], ...]:
        """Every group element as an id permutation, identity first.

        Raises InfiniteClosureError when the closure exceeds ``bound``.
        """
        if self._closure is None:
            ids = sorted(self.complex.cells)
            identity = tuple(ids)
            index = {c: i for i, c in enumerate(ids)}
            gens = []
            for name in sorted(self.generators):
                a = self.generators[name].assignment
                gens.append(tuple(a[c] for c in ids))
            seen = {identity}
            order = [identity]
            queue = deque([identity])
            while queue:
                cur = queue.popleft()
                for g in gens:
                    nxt = tuple(g[index[c]] for c in cur)
                    if nxt not in seen:
                        if len(seen) >= bound:
                            raise InfiniteClosureError(f"group closure exceeded bound {bound}")
                        seen.add(nxt)
                        order.append(nxt)
                        queue.append(nxt)
            self._closure = tuple({c: perm[i] for i, c in enumerate(ids)} for perm in order)
        return self._closure

    @property
    def order(self) -> int:
        return len(self.closure())


def _compose_words(action: SimplicialAction, word: Sequence[str]) -> dict[str, str]:
    # words act left to right: (a, b) sends c to b(a(c))
    cur = {c: c for c in action.complex.cells}
    for name in word:
        g = action.generators[name].assignment
        cur = {c: g[v] for c, v in cur.items()}
    return cur


def validate_action(x: DeltaComplex, action: SimplicialAction, *, closure_bound: int = DEFAULT_CLOSURE_BOUND) -> ValidationReport:
    """Check generators, relations, and closure; never raises on bad input.

    Violation rules: "not-bijective" (missing or unknown cells, repeats),
    "facet-incompatible" (dimension change or facet multisets disagree),
    "relation-violated", "infinite-closure".
    """
    violations: list[Violation] = []
    all_ids = set(x.cells)
    for name in sorted(action.generators):
        cmap = action.generators[name]
        a = dict(cmap.assignment)
        missing = sorted(all_ids - a.keys())
        unknown = sorted(set(a) - all_ids)
        bad_targets = sorted(v for v in a.values() if v not in all_ids)
        for m in missing:
            violations.append(Violation(m, "not-bijective", f"generator {name!r} has no image for this cell"))
        for u in unknown:
            violations.append(Violation(u, "not-bijective", f"generator {name!r} maps a cell not in the complex"))
        for b in bad_targets:
            violations.append(Violation(b, "not-bijective", f"generator {name!r} maps onto unknown cell {b!r}"))
        if missing or unknown or bad_targets:
            continue
        values = list(a.values())
        if len(set(values)) != len(values):
            dupes = sorted({v for v in values if values.count(v) > 1})
            violations.append(
                Violation(dupes[0], "not-bijective", f"generator {name!r} is not injective (hits {dupes[0]!r} twice)")
            )
            continue
        ok = True
        for c in x.cells.values():
            img = x.cell(a[c.id])
            if img.dim != c.dim:
                violations.append(
                    Violation(c.id, "facet-incompatible", f"generator {name!r} changes dimension {c.dim} -> {img.dim}")
                )
                ok = False
                continue
            if sorted(a[f] for f in c.facets) != sorted(img.facets):
                violations.append(
                    Violation(c.id, "facet-incompatible", f"generator {name!r} does not commute with the facet maps")
                )
                ok = False
        if not ok:
            continue
    if not violations:
        for word in action.relations:
            unknown_names = [w for w in word if w not in action.generators]
            if unknown_names:
                violations.append(
                    Violation("", "relation-violated", f"relation {list(word)} uses unknown generator {unknown_names[0]!r}")
                )
                continue
            composed = _compose_words(action, word)
            if any(c != v for c, v in composed.items()):
                bad = sorted(c for c, v in composed.items() if c != v)[0]
                violations.append(
                    Violation(bad, "relation-violated", f"relation {list(word)} does not act as the identity")
                )
        try:
            action.closure(bound=closure_bound)
        except InfiniteClosureError as e:
            violations.append(Violation("", "infinite-closure", str(e)))
    return ValidationReport(tuple(violations))


_ACTION_RULE_ERRORS = {
    "not-bijective": NotBijectiveError,
    "facet-incompatible": FacetIncompatibleError,
    "relation-violated": RelationViolatedError,
    "infinite-closure": InfiniteClosureError,
}


def _require_valid(x: DeltaComplex, action: SimplicialAction) -> None:
    report = validate_action(x, action)
    if not report.ok:
        first = report.violations[0]
        raise _ACTION_RULE_ERRORS[first.rule](f"cell {first.cell_id!r}: {first.detail}")


def _is_regular(x: DeltaComplex, action: SimplicialAction) -> bool:
    # regular: whenever g fixes a cell setwise, it fixes its vertices
    for g in action.closure():
        if all(k == v for k, v in g.items()):
            continue
        for cid, img in g.items():
            if img == cid:
                for v in x.vertex_tuple(cid):
                    if g[v] != v:
                        return False
    return True


def _vertex_positions(x: DeltaComplex, g: Mapping[str, str], cell_id: str) -> list[int]:
    """pi with g(vertex_j(c)) = vertex_{pi[j]}(g(c)); needs a regular image cell."""
    src = x.vertex_tuple(cell_id)
    dst = x.vertex_tuple(g[cell_id])
    if len(set(dst)) != len(dst):
        raise AmbiguousVertexMatchError(
            f"cell {g[cell_id]!r} has repeated vertices; subdivide before transporting maps"
        )
    where = {v: i for i, v in enumerate(dst)}
    pi = []
    for v in src:
        w = g[v]
        if w not in where:
            raise FacetIncompatibleError(f"image of vertex {v!r} is not a vertex of {g[cell_id]!r}")
        pi.append(where[w])
    return pi


def _perm_sign(pi: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(pi)
    for i in range(len(pi)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = pi[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def _transport_through_subdivision(
    x: DeltaComplex,
    sd: DeltaComplex,
    chart: Mapping[str, tuple[str, tuple[frozenset[int], ...]]],
    g: Mapping[str, str],
) -> dict[str, str]:
    # image of a flag: apply the per-cell vertex permutation to every chain member
    from .complex_core import _sd_id

    pis = {cid: _vertex_positions(x, g, cid) for cid in x.cells}
    # sanity: the derived reindexing must commute with the facet maps
    for cid, pi in pis.items():
        c = x.cell(cid)
        img = x.cell(g[cid])
        for i, f in enumerate(c.facets):
            assert g[f] == img.facets[pi[i]], "vertex matching disagrees with facet structure"
    out = {}
    for sid, (base, chain) in chart.items():
        pi = pis[base]
        new_chain = tuple(frozenset(pi[p] for p in v) for v in chain)
        out[sid] = _sd_id(g[base], new_chain)
    return out


def regularize(
    x: DeltaComplex, action: SimplicialAction, *, max_subdivisions: int = 2
) -> tuple[DeltaComplex, SimplicialAction]:
    """Barycentrically subdivide until the action is regular.

    Free actions and trivial groups come back unchanged.  Two
    subdivisions always suffice; if the result were still not regular
    that would be a bug, so it fails loudly rather than returning.
    """
    _require_valid(x, action)
    for _ in range(max_subdivisions + 1):
        if _is_regular(x, action):
            return x, action
        sd, chart = _barycentric_with_chart(x)
        new_gens = {}
        for name in sorted(action.generators):
            assignment = _transport_through_subdivision(x, sd, chart, action.generators[name].assignment)
            new_gens[name] = CellMap(sd, sd, assignment)
        new_action = SimplicialAction(sd, new_gens, action.relations)
        report = validate_action(sd, new_action)
        assert report.ok, f"subdivided action failed validation: {report.violations[0]}"
        x, action = sd, new_action
    raise AssertionError(f"action still not regular after {max_subdivisions} barycentric subdivisions")


def _orbits(action: SimplicialAction) -> dict[str, str]:
    """cell id -> lexicographically smallest id in its orbit."""
    gens = [action.generators[name].assignment for name in sorted(action.generators)]
    rep: dict[str, str] = {}
    for start in sorted(action.complex.cells):
        if start in rep:
            continue
        orbit = {start}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            for g in gens:
                nxt = g[cur]
                if nxt not in orbit:
                    orbit.add(nxt)
                    queue.append(nxt)
        r = min(orbit)
        for c in orbit:
            rep[c] = r
    return rep


def quotient(
    x: DeltaComplex, action: SimplicialAction, *, auto_regularize: bool = False
) -> tuple[DeltaComplex, CellMap]:
    """Quotient complex plus the projection map.

    Cells of the quotient are orbits; each orbit keeps the cell id of
    its lexicographically smallest member, and that member also donates
    the facet ordering, so the output is deterministic.  Non-regular
    actions are refused unless ``auto_regularize`` is set, because a
    silent subdivision would change the cell-level answers users see.
    """
    _require_valid(x, action)
    if not _is_regular(x, action):
        if not auto_regularize:
            raise NotRegularActionError(
                "action is not regular (a stabilizer moves vertices); "
                "pass auto_regularize=True or call regularize() first"
            )
        x, action = regularize(x, action)
    rep = _orbits(action)
    cells = []
    for orbit_rep in sorted(set(rep.values())):
        c = x.cell(orbit_rep)
        facets = tuple(rep[f] for f in c.facets)
        cells.append(Cell(orbit_rep, c.dim, facets, label=c.label))
    q = build_complex(cells)
    projection = CellMap(x, q, rep)
    return q, projection


def orientation_character(x: DeltaComplex, action: SimplicialAction) -> dict[str, int]:
    """Sign by which each generator rescales the global orientation.

    The orientation assignment is pulled back along the generator and
    compared with itself at the propagation root; the comparison is also
    recomputed at every top cell, where it must be constant.
    """
    _require_valid(x, action)
    cls = classify(x)
    if cls.verdict != CLOSED_PSEUDO_MANIFOLD:
        raise NotClosedError(f"verdict {cls.verdict}: character needs a closed pseudo-manifold")
    if not is_orientable(x):
        raise NotOrientableError("character needs an orientable pseudo-manifold")
    oa = orientation_assignment(x)
    assert oa is not None
    omega = oa.signs
    n = x.dimension
    tops = x.ids_of_dim(n)
    out = {}
    for name in sorted(action.generators):
        g = action.generators[name].assignment
        values = set()
        for t in tops:
            eps = _perm_sign(_vertex_positions(x, g, t))
            values.add(eps * omega[t] * omega[g[t]])
        if len(values) != 1:
            raise AssertionError(f"generator {name!r} does not rescale the orientation by a constant sign")
        out[name] = values.pop()
    return out


@dataclass(frozen=True, eq=False)
class DoubleCover:
    """Branched orientation double cover of a closed pseudo-manifold.

    ``branch_cells`` are the base cells whose fiber has one point; on an
    orientable base it is empty and the total space is two disjoint
    copies.  ``deck`` is the sheet-swapping involution of the total
    space and ``projection`` the covering map.
    """

    total: DeltaComplex
    projection: CellMap
    deck: CellMap
    branch_cells: frozenset[str]


def _slot_lift(q_positions: Iterable[int], slot: int) -> frozenset[int]:
    # embed facet positions through the inclusion that skips `slot`
    return frozenset(q if q < slot else q + 1 for q in q_positions)


def orientation_double_cover(x: DeltaComplex) -> DoubleCover:
    """Glue two oppositely oriented copies of every top cell.

    Top cells appear once per orientation sign.  Copies are glued across
    each interior (n-1)-cell the unique way that makes induced
    orientations cancel.  A lower cell lifts once per connected
    component of its oriented star: the incidence flags (top cell,
    vertex positions, sign) containing it, connected through the
    (n-1)-cell gluings.  Cells with a single component are the branch
    locus.
    """
    cls = classify(x)
    if cls.verdict != CLOSED_PSEUDO_MANIFOLD:
        raise NotClosedError(f"verdict {cls.verdict}: the cover needs a closed pseudo-manifold")
    n = x.dimension
    tops = x.ids_of_dim(n)
    inc = _incidences(x)

    # disjoint-set over flags (top id, frozenset of kept positions, sign)
    parent: dict[tuple, tuple] = {}

    def find(a: tuple) -> tuple:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(a: tuple, b: tuple) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    full = frozenset(range(n + 1))
    subsets_top: list[frozenset[int]] = []
    for mask in range(1, 1 << (n + 1)):
        subsets_top.append(frozenset(i for i in range(n + 1) if mask >> i & 1))
    for t in tops:
        for p in subsets_top:
            parent[(t, p, 1)] = (t, p, 1)
            parent[(t, p, -1)] = (t, p, -1)

    subsets_facet: list[frozenset[int]] = []
    for mask in range(1, 1 << n) if n else []:
        subsets_facet.append(frozenset(i for i in range(n) if mask >> i & 1))
    for occ in inc.values():
        if len(occ) != 2:
            continue
        (t1, i1), (t2, i2) = occ
        rel = -((-1) ** (i1 + i2))  # s2 = rel * s1 makes the orientations cancel
        for q in subsets_facet:
            p1 = _slot_lift(q, i1)
            p2 = _slot_lift(q, i2)
            for s1 in (1, -1):
                union((t1, p1, s1), (t2, p2, rel * s1))

    # group flags by base cell, list components deterministically
    def flag_key(f: tuple) -> tuple:
        return (f[0], tuple(sorted(f[1])), -f[2])

    base_of_flag: dict[tuple, str] = {}
    components: dict[tuple, list[tuple]] = {}
    for f in parent:
        base_of_flag[f] = iterated_face(x, f[0], full - f[1])
        components.setdefault(find(f), []).append(f)

    comp_base: dict[tuple, str] = {}
    for root, flags in components.items():
        bases = {base_of_flag[f] for f in flags}
        assert len(bases) == 1, "a component must lie over a single base cell"
        comp_base[root] = bases.pop()

    by_base: dict[str, list[tuple]] = {}
    for root, flags in components.items():
        flags.sort(key=flag_key)
        by_base.setdefault(comp_base[root], []).append(root)

    comp_id: dict[tuple, str] = {}
    for base, roots in by_base.items():
        roots.sort(key=lambda r: flag_key(min(components[r], key=flag_key)))
        for k, root in enumerate(roots):
            comp_id[root] = f"{base}~{k}"

    cells = []
    for root, flags in components.items():
        canon = min(flags, key=flag_key)
        t, p, s = canon
        kept = sorted(p)
        dim = len(kept) - 1
        facets = []
        for j in range(dim + 1) if dim else []:
            p_facet = frozenset(v for v in p if v != kept[j])
            facets.append(comp_id[find((t, p_facet, s))])
        base = comp_base[root]
        cells.append(Cell(comp_id[root], dim, tuple(facets), label=x.cell(base).label))
    total = build_complex(cells)

    projection = CellMap(total, x, {comp_id[r]: comp_base[r] for r in components})
    deck_map = {}
    for root, flags in components.items():
        t, p, s = min(flags, key=flag_key)
        deck_map[comp_id[root]] = comp_id[find((t, p, -s))]
    deck = CellMap(total, total, deck_map)
    branch = frozenset(base for base, roots in by_base.items() if len(roots) == 1)
    return DoubleCover(total, projection, deck, branch)


def is_strict_isomorphism(cmap: CellMap) -> bool:
    """Whether a cell map is a bijection matching facets index by index."""
    src, dst, a = cmap.source, cmap.target, dict(cmap.assignment)
    if sorted(a) != sorted(src.cells) or sorted(a.values()) != sorted(dst.cells):
        return False
    for c in src.cells.values():
        img = dst.cell(a[c.id])
        if img.dim != c.dim:
            return False
        if tuple(a[f] for f in c.facets) != img.facets:
            return False
    return True


# ---------------------------------------------------------------------------
# serialization


def action_to_json(action: SimplicialAction) -> str:
    doc = {
        "generators": {name: dict(sorted(cm.assignment.items())) for name, cm in sorted(action.generators.items())},
        "relations": [list(w) for w in action.relations],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def action_from_json(x: DeltaComplex, text: str) -> SimplicialAction:
    """Bind a serialized action to a complex.  Structural checks only;
    run :func:`validate_action` for the full contract."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"not valid JSON: {e}") from None
    hint = 'expected {"generators": {name: {id: id}}, "relations": [[name...]]}'
    if not isinstance(doc, dict) or not isinstance(doc.get("generators"), dict):
        raise ValueError(hint)
    gens = {}
    for name, table in doc["generators"].items():
        if not isinstance(table, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in table.items()
        ):
            raise ValueError(hint)
        gens[name] = CellMap(x, x, dict(table))
    relations = doc.get("relations", [])
    if not isinstance(relations, list) or not all(
        isinstance(w, list) and all(isinstance(s, str) for s in w) for w in relations
    ):
        raise ValueError(hint)
    return SimplicialAction(x, gens, [tuple(w) for w in relations])


def cover_to_json(cover: DoubleCover) -> str:
    from .complex_core import to_json

    doc = {
        "total": json.loads(to_json(cover.total)),
        "projection": dict(sorted(cover.projection.assignment.items())),
        "deck": dict(sorted(cover.deck.assignment.items())),
        "branch_cells": sorted(cover.branch_cells),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"

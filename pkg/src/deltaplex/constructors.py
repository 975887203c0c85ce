"""Ready-made complexes and actions used throughout the test corpus.

Cell ids are human-readable and deterministic: spheres built from
coordinate data use signed axis names, simplex boundaries use vertex
lists, suspensions prefix apex names.  All constructors return validated
complexes.
"""

from __future__ import annotations

import functools
from itertools import combinations
from typing import Optional

from .complex_core import Cell, DeltaComplex, build_complex, euler_characteristic
from .group_actions import CellMap, SimplicialAction, quotient

__all__ = [
    "hyperoctahedron",
    "simplex_boundary",
    "suspension",
    "antipodal_action",
    "cyclic_permutation_action",
    "rp2",
]


def _signed_id(signs: tuple[int, ...], axes: tuple[int, ...]) -> str:
    return ",".join(f"{'+' if s > 0 else '-'}e{a}" for s, a in zip(signs, axes))


def hyperoctahedron(n: int) -> DeltaComplex:
    """Boundary of the n-dimensional cross-polytope, a sphere of dimension n-1.

    Cells are the faces spanned by one signed unit vector per axis in a
    nonempty subset of the n axes, ordered by axis.  2^k * C(n, k) cells
    of dimension k-1; the complex is regular.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    cells = []
    for k in range(1, n + 1):
        for axes in combinations(range(1, n + 1), k):
            for mask in range(1 << k):
                signs = tuple(1 if mask >> i & 1 == 0 else -1 for i in range(k))
                cid = _signed_id(signs, axes)
                facets = tuple(
                    _signed_id(signs[:i] + signs[i + 1:], axes[:i] + axes[i + 1:]) for i in range(k)
                ) if k > 1 else ()
                cells.append(Cell(cid, k - 1, facets))
    return build_complex(cells)


def simplex_boundary(m: int) -> DeltaComplex:
    """Boundary of the simplex on vertices 1..m, a sphere of dimension m-2."""
    if m < 2:
        raise ValueError("need m >= 2")
    cells = []
    for k in range(1, m):
        for verts in combinations(range(1, m + 1), k):
            cid = ",".join(str(v) for v in verts)
            facets = tuple(
                ",".join(str(v) for v in verts[:i] + verts[i + 1:]) for i in range(k)
            ) if k > 1 else ()
            cells.append(Cell(cid, k - 1, facets))
    return build_complex(cells)


def _fresh_apexes(x: DeltaComplex) -> tuple[str, str]:
    south, north = "p", "q"
    while south in x.cells or north in x.cells:
        south, north = south + "'", north + "'"
    return south, north


def suspension(x: DeltaComplex, apexes: Optional[tuple[str, str]] = None) -> DeltaComplex:
    """Join with two new apex vertices; the cone vertex comes last.

    A k-cell c yields two (k+1)-cells p:c and q:c whose facets are the
    cones over the facets of c followed by c itself, so the apex sits in
    the final vertex position.  Euler characteristic flips to 2 - chi.
    """
    if apexes is None:
        apexes = _fresh_apexes(x)
    south, north = apexes
    if south == north or south in x.cells or north in x.cells:
        raise ValueError("apex names must be two distinct unused cell ids")
    cells = [Cell(c.id, c.dim, c.facets, label=c.label) for c in x.cells.values()]
    cells.append(Cell(south, 0, ()))
    cells.append(Cell(north, 0, ()))
    for apex in (south, north):
        for c in x.cells.values():
            facets = tuple(f"{apex}:{f}" for f in c.facets) + (c.id,) if c.dim else (apex, c.id)
            cells.append(Cell(f"{apex}:{c.id}", c.dim + 1, facets, label=c.label))
    sx = build_complex(cells)
    assert euler_characteristic(sx) == 2 - euler_characteristic(x)
    return sx


def _flip(cid: str) -> str:
    return ",".join(
        ("-" if part[0] == "+" else "+") + part[1:] for part in cid.split(",")
    )


def antipodal_action(n: int) -> SimplicialAction:
    """The free sign-flip involution on hyperoctahedron(n)."""
    x = hyperoctahedron(n)
    assignment = {cid: _flip(cid) for cid in x.cells}
    cmap = CellMap(x, x, assignment)
    return SimplicialAction(x, {"a": cmap}, relations=[("a", "a")])


def cyclic_permutation_action(m: int) -> SimplicialAction:
    """The vertex rotation 1 -> 2 -> ... -> m -> 1 on simplex_boundary(m)."""
    x = simplex_boundary(m)
    rot = {v: v % m + 1 for v in range(1, m + 1)}
    assignment = {}
    for cid in x.cells:
        verts = sorted(rot[int(p)] for p in cid.split(","))
        assignment[cid] = ",".join(str(v) for v in verts)
    cmap = CellMap(x, x, assignment)
    return SimplicialAction(x, {"r": cmap}, relations=[("r",) * m])


@functools.lru_cache(maxsize=1)
def rp2() -> DeltaComplex:
    """Real projective plane as the antipodal quotient of a sphere.

    The antipodal action on hyperoctahedron(3) is free, hence regular,
    so the orbit quotient is itself a Delta-complex: 3 vertices, 6
    edges, 4 triangles.
    """
    action = antipodal_action(3)
    q, _ = quotient(action.complex, action)
    return q

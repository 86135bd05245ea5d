"""Mesh families: clipped hexagons, bounded Voronoi diagrams, Koch-snowflake tiles."""

import itertools

import numpy as np
from scipy.spatial import Voronoi, cKDTree

from ..exceptions import InvalidParameterError
from .core import BOUNDARY_TOL, PolygonalMesh

# Hexagon corners in units of (pitch / 6), relative to the cell center.
_HEX = np.array([[4, 0], [2, 3], [-2, 3], [-4, 0], [-2, -3], [2, -3]], dtype=np.int64)


def gen_hexagonal(m):
    """Hexagonal mesh of the unit square with ``m`` column pitches.

    Cell centers sit on columns ``x = k/m`` (``k = 0..m``); even columns have
    centers at ``y = j/m`` and odd columns are shifted by half a pitch.  Each
    hexagon has corners ``(+-2w/3, 0)`` and ``(+-w/3, +-w/2)`` with ``w = 1/m``,
    and cells crossing the square are clipped.  With ``m = 100`` this gives
    10151 cells, ``h = 1/75`` and ``h_min = 1/300``.

    All coordinates are integers in units of ``w/6`` before scaling, so the
    clipping and the vertex merging are exact.
    """
    m = int(m)
    if m < 2:
        raise InvalidParameterError(f"gen_hexagonal needs m >= 2, got {m}")
    top = 6 * m
    loops = []
    for k in range(m + 1):
        cx = 6 * k
        if k % 2 == 0:
            centers = [6 * j for j in range(m + 1)]
        else:
            centers = [6 * j + 3 for j in range(m)]
        for cy in centers:
            poly = _HEX + np.array([cx, cy])
            poly = _clip_axis(poly, 0, 0, keep_above=True)
            poly = _clip_axis(poly, 0, top, keep_above=False)
            poly = _clip_axis(poly, 1, 0, keep_above=True)
            poly = _clip_axis(poly, 1, top, keep_above=False)
            if len(poly) >= 3 and _int_area2(poly) > 0:
                loops.append(poly)
    return _mesh_from_int_loops(loops, top)


def _clip_axis(poly, axis, value, keep_above):
    """Sutherland-Hodgman clip of an integer polygon against one axis line."""
    out = []
    n = len(poly)
    sign = 1 if keep_above else -1
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        dp, dq = sign * (p[axis] - value), sign * (q[axis] - value)
        if dp >= 0:
            out.append(p)
        if (dp > 0 > dq) or (dp < 0 < dq):
            num = (value - p[axis]) * (q - p)
            den = q[axis] - p[axis]
            if np.any(num % den):
                raise AssertionError("non-lattice hexagon clip point")
            out.append(p + num // den)
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    out = np.array(out)
    keep = np.any(out != np.roll(out, 1, axis=0), axis=1)
    return out[keep]


def _int_area2(poly):
    x, y = poly[:, 0], poly[:, 1]
    return int(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _mesh_from_int_loops(loops, scale):
    allpts = np.concatenate(loops)
    uniq, inverse = np.unique(allpts, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    sizes = [len(p) for p in loops]
    cell_ptr = np.concatenate([[0], np.cumsum(sizes)])
    return PolygonalMesh(uniq / float(scale), cell_ptr, inverse)


def gen_voronoi(n_seeds, rng_seed=0):
    """Bounded Voronoi mesh of ``n_seeds`` uniform random points in the unit square.

    Parameters
    ----------
    n_seeds : int
        Number of seeds (and of cells), at least 4.
    rng_seed : int or numpy.random.Generator
        Seed for :func:`numpy.random.default_rng`, or a generator-like object
        exposing ``random(size)``.

    Notes
    -----
    The diagram is computed once for the seeds together with the mirror
    images of the seeds near each side, so every cell is exactly the
    intersection of its Voronoi region with the square and neighboring cells
    share vertex indices.  Tiny edges are kept.
    """
    n_seeds = int(n_seeds)
    if n_seeds < 4:
        raise InvalidParameterError(f"gen_voronoi needs n_seeds >= 4, got {n_seeds}")
    rng = rng_seed if hasattr(rng_seed, "random") else np.random.default_rng(rng_seed)
    seeds = _draw_seeds(rng, n_seeds)
    return voronoi_from_seeds(seeds)


def _draw_seeds(rng, n):
    seeds = np.asarray(rng.random((n, 2)), dtype=np.float64)
    for _ in range(1000):
        bad = set(np.flatnonzero(np.any((seeds < 1e-14) | (seeds > 1 - 1e-14), axis=1)).tolist())
        for i, j in cKDTree(seeds).query_pairs(1e-14):
            bad.add(max(i, j))
        if not bad:
            return seeds
        for i in sorted(bad):
            seeds[i] = rng.random(2)
    raise RuntimeError("could not draw distinct seeds")


def voronoi_from_seeds(seeds):
    """Voronoi mesh of the unit square generated by explicit seed points."""
    seeds = np.asarray(seeds, dtype=np.float64)
    n = seeds.shape[0]
    # Seeds far from a side cannot have cells touching it; mirror a strip and
    # widen it until every cell lies inside the square.
    strip = min(1.0, 4.0 / np.sqrt(n))
    while True:
        verts, loops, ok = _mirrored_voronoi(seeds, strip)
        if ok or strip >= 1.0:
            break
        strip = min(1.0, 2.0 * strip)
    if not ok:
        raise RuntimeError("Voronoi cells escape the unit square")

    verts[np.abs(verts) <= BOUNDARY_TOL] = 0.0
    verts[np.abs(verts - 1.0) <= BOUNDARY_TOL] = 1.0
    sizes = np.array([len(r) for r in loops])
    flat = np.fromiter(itertools.chain.from_iterable(loops), dtype=np.int64, count=sizes.sum())
    owner = np.repeat(np.arange(n), sizes)
    d = verts[flat] - seeds[owner]
    order = np.lexsort((np.arctan2(d[:, 1], d[:, 0]), owner))
    flat = flat[order]

    used, inverse = np.unique(flat, return_inverse=True)
    # merge coincident vertices (qhull may split a degenerate vertex)
    coords, remap = np.unique(verts[used], axis=0, return_inverse=True)
    flat = remap.ravel()[inverse.ravel()]
    cell_ptr = np.concatenate([[0], np.cumsum(sizes)])
    nxt = np.arange(flat.size) + 1
    nxt[cell_ptr[1:] - 1] = cell_ptr[:-1]
    repeated = flat == flat[nxt]
    if repeated.any():
        keep = ~repeated
        sizes = np.add.reduceat(keep.astype(np.int64), cell_ptr[:-1])
        flat = flat[keep]
        cell_ptr = np.concatenate([[0], np.cumsum(sizes)])
    return PolygonalMesh(coords, cell_ptr, flat)


def _mirrored_voronoi(seeds, strip):
    x, y = seeds[:, 0], seeds[:, 1]
    parts = [seeds]
    for near, image in (
        (x < strip, np.column_stack([-x, y])),
        (x > 1 - strip, np.column_stack([2.0 - x, y])),
        (y < strip, np.column_stack([x, -y])),
        (y > 1 - strip, np.column_stack([x, 2.0 - y])),
    ):
        parts.append(image[near])
    vor = Voronoi(np.concatenate(parts))
    regions = [vor.regions[r] for r in vor.point_region[:seeds.shape[0]]]
    ok = all(len(r) >= 3 and min(r) >= 0 for r in regions)
    if ok:
        idx = np.unique(np.fromiter(itertools.chain.from_iterable(regions), dtype=np.int64))
        v = vor.vertices[idx]
        ok = bool(np.all((v >= -BOUNDARY_TOL) & (v <= 1 + BOUNDARY_TOL)))
    return vor.vertices.copy(), regions, ok


def koch_snowflake(level, center=(0.0, 0.0), radius=1.0, rotation=np.deg2rad(15.0)):
    """Counter-clockwise vertices of the Koch snowflake iterate ``level``.

    The iterate has ``3 * 4**level`` vertices; ``radius`` is the circumradius
    of the initial equilateral triangle (which the outer tips keep).
    """
    ang = rotation + np.pi / 2 + np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3])
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    rot = np.array([[0.5, np.sqrt(3) / 2], [-np.sqrt(3) / 2, 0.5]])  # clockwise 60 deg
    for _ in range(level):
        p = pts
        q = np.roll(pts, -1, axis=0)
        a = p + (q - p) / 3.0
        b = p + 2.0 * (q - p) / 3.0
        tip = a + (b - a) @ rot.T
        pts = np.stack([p, a, tip, b], axis=1).reshape(-1, 2)
    return np.asarray(center) + radius * pts


def gen_koch(level, tiles):
    """Tiles of Koch snowflakes with four complement polygons per tile.

    The unit square is split into ``tiles x tiles`` squares.  Each square holds
    one snowflake iterate and four polygons that join the square's corners to
    the snowflake's right-, top-, left- and bottom-most vertices.
    """
    level, tiles = int(level), int(tiles)
    if not 1 <= level <= 4:
        raise InvalidParameterError(f"gen_koch needs level in [1, 4], got {level}")
    if tiles < 1:
        raise InvalidParameterError(f"gen_koch needs tiles >= 1, got {tiles}")
    side = 1.0 / tiles
    flake = koch_snowflake(level, radius=0.4)  # unit tile centered at the origin
    nf = flake.shape[0]
    e_right = int(np.argmax(flake[:, 0]))
    e_top = int(np.argmax(flake[:, 1]))
    e_left = int(np.argmin(flake[:, 0]))
    e_bottom = int(np.argmin(flake[:, 1]))

    n_grid = (tiles + 1) ** 2
    grid = np.array([(i / tiles, j / tiles) for j in range(tiles + 1) for i in range(tiles + 1)])
    blocks = [grid]
    loops = []
    for tj in range(tiles):
        for ti in range(tiles):
            base = n_grid + (tj * tiles + ti) * nf
            blocks.append((flake + [ti + 0.5, tj + 0.5]) * side)
            bl = tj * (tiles + 1) + ti
            br, tl, tr = bl + 1, bl + tiles + 1, bl + tiles + 2
            loops.append(base + np.arange(nf))
            corners = [br, tr, tl, bl]
            extremes = [e_bottom, e_right, e_top, e_left]
            for c in range(4):
                c0, c1 = corners[c], corners[(c + 1) % 4]
                start, stop = extremes[(c + 1) % 4], extremes[c]
                arc = [(start - s) % nf for s in range((start - stop) % nf + 1)]
                loops.append(np.array([c0, c1] + [base + a for a in arc]))
    verts = np.concatenate(blocks)
    return PolygonalMesh.from_cells(verts, loops)

"""Plain-text mesh files.

Layout::

    POLYMESH 1
    <n_vertices> <n_cells>
    x y                 (n_vertices lines, hex-float or decimal)
    k i1 ... ik         (n_cells lines, 0-based CCW loops)
"""

import numpy as np

from ..exceptions import MeshFormatError
from .core import PolygonalMesh

MAGIC = "POLYMESH"
VERSION = 1


def save_mesh(mesh, path):
    """Write ``mesh`` with hex-float coordinates (bit-exact round trip)."""
    with open(path, "w") as fh:
        fh.write(f"{MAGIC} {VERSION}\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_cells}\n")
        for x, y in mesh.vertices.tolist():
            fh.write(f"{x.hex()} {y.hex()}\n")
        for loop in mesh.cells:
            fh.write(f"{len(loop)} {' '.join(map(str, loop.tolist()))}\n")


def _parse_float(tok, lineno):
    try:
        return float.fromhex(tok) if "0x" in tok.lower() else float(tok)
    except ValueError:
        raise MeshFormatError(f"bad coordinate {tok!r}", lineno) from None


def load_mesh(path, validate=True):
    """Read a mesh written by :func:`save_mesh` (or by hand, in decimal).

    Raises
    ------
    MeshFormatError
        On any syntax problem, reporting the offending line.
    MeshValidationError
        If the parsed mesh violates the tessellation invariants.
    """
    with open(path) as fh:
        lines = fh.read().splitlines()

    def line(i):
        if i >= len(lines):
            raise MeshFormatError("unexpected end of file", i + 1)
        return lines[i].split()

    head = line(0)
    if len(head) != 2 or head[0] != MAGIC:
        raise MeshFormatError(f"expected '{MAGIC} {VERSION}' header", 1)
    if head[1] != str(VERSION):
        raise MeshFormatError(f"unsupported version {head[1]}", 1)
    counts = line(1)
    try:
        n_v, n_elt = (int(t) for t in counts)
    except ValueError:
        raise MeshFormatError("expected '<n_vertices> <n_cells>'", 2) from None
    if n_v < 0 or n_elt < 0:
        raise MeshFormatError("negative count", 2)

    verts = np.empty((n_v, 2))
    for i in range(n_v):
        toks = line(2 + i)
        if len(toks) != 2:
            raise MeshFormatError("expected two coordinates", 3 + i)
        verts[i] = (_parse_float(toks[0], 3 + i), _parse_float(toks[1], 3 + i))

    loops = []
    for c in range(n_elt):
        lineno = 3 + n_v + c
        toks = line(2 + n_v + c)
        try:
            ints = [int(t) for t in toks]
        except ValueError:
            raise MeshFormatError("non-integer in cell line", lineno) from None
        if not ints or ints[0] != len(ints) - 1:
            raise MeshFormatError("vertex count does not match cell line", lineno)
        if any(not 0 <= v < n_v for v in ints[1:]):
            raise MeshFormatError("vertex index out of range", lineno)
        loops.append(ints[1:])
    for j in range(2 + n_v + n_elt, len(lines)):
        if lines[j].strip():
            raise MeshFormatError("trailing data", j + 1)

    mesh = PolygonalMesh.from_cells(verts, loops)
    if validate:
        mesh.validate()
    return mesh

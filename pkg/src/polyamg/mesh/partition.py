"""Balanced partitioning of mesh cells by greedy region growing."""

import heapq
from dataclasses import dataclass

import numba
import numpy as np

from ..exceptions import InvalidParameterError

TRIES = 4  # growth starts tried per bisection (more for small groups)


@dataclass(frozen=True)
class Partition:
    """Assignment of every cell to one of ``n_parts`` parts."""

    part_of_cell: np.ndarray
    n_parts: int

    @property
    def sizes(self):
        return np.bincount(self.part_of_cell, minlength=self.n_parts)


@numba.njit(cache=True)
def _farthest(indptr, indices, group, gid, start, stamp, tick):
    """Last cell reached by a BFS inside ``group == gid`` from ``start``."""
    queue = np.empty(group.shape[0], dtype=np.int64)
    stamp[start] = tick
    queue[0] = start
    head, tail = 0, 1
    while head < tail:
        c = queue[head]
        head += 1
        for k in range(indptr[c], indptr[c + 1]):
            j = indices[k]
            if stamp[j] != tick and group[j] == gid:
                stamp[j] = tick
                queue[tail] = j
                tail += 1
    return queue[tail - 1]


@numba.njit(cache=True)
def _grow(indptr, indices, group, gid, start, target, new_gid, gain, order):
    """Move ``target`` cells of ``group == gid`` into ``new_gid``, growing from ``start``.

    The next cell is always the frontier cell with the most neighbors already
    taken (first come first served on ties), which keeps the region and the
    remainder compact.  If the frontier empties early the growth restarts at
    the lowest-numbered remaining member.  The cells taken are written to
    ``order`` in the order they were taken.
    """
    n = group.shape[0]
    heap = [(0, 0, start)]
    heap.pop()
    seq = 0
    taken = 0
    scan = 0
    seed = start
    while taken < target:
        if not heap:
            if seed < 0:
                while scan < n and group[scan] != gid:
                    scan += 1
                if scan == n:
                    break
                seed = scan
            gain[seed] = 1
            heapq.heappush(heap, (-1, seq, seed))
            seq += 1
            seed = -1
        g, _, c = heapq.heappop(heap)
        if group[c] != gid or -g != gain[c]:
            continue
        group[c] = new_gid
        order[taken] = c
        taken += 1
        for k in range(indptr[c], indptr[c + 1]):
            j = indices[k]
            if group[j] == gid:
                gain[j] += 1
                heapq.heappush(heap, (-gain[j], seq, j))
                seq += 1
    for k in range(n):
        gain[k] = 0
    return taken


@numba.njit(cache=True)
def _settle(indptr, indices, group, gid, new_gid, order, taken):
    """Keep the part left behind by a growth step in one piece.

    Components of ``group == gid`` other than the largest are handed to
    ``new_gid``; the kept component then grows back into ``new_gid`` by the
    same most-neighbors rule until ``new_gid`` has ``taken`` cells again.
    """
    n = group.shape[0]
    comp = -np.ones(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    best, best_size, nc = -1, 0, 0
    for s in range(n):
        if group[s] != gid or comp[s] >= 0:
            continue
        comp[s] = nc
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            c = queue[head]
            head += 1
            for k in range(indptr[c], indptr[c + 1]):
                j = indices[k]
                if group[j] == gid and comp[j] < 0:
                    comp[j] = nc
                    queue[tail] = j
                    tail += 1
        if tail > best_size:
            best, best_size = nc, tail
        nc += 1
    if nc <= 1:
        return
    excess = 0
    for i in range(n):
        if group[i] == gid and comp[i] != best:
            group[i] = new_gid
            excess += 1
    # grow the kept component back into new_gid, most-surrounded cells first
    gain = np.zeros(n, dtype=np.int64)
    heap = [(0, 0, 0)]
    heap.pop()
    seq = 0
    for pos in range(taken - 1, -1, -1):
        c = order[pos]
        for k in range(indptr[c], indptr[c + 1]):
            if group[indices[k]] == gid:
                gain[c] += 1
        if gain[c] > 0:
            heapq.heappush(heap, (-gain[c], seq, c))
            seq += 1
    while excess > 0 and heap:
        g, _, c = heapq.heappop(heap)
        if group[c] != new_gid or -g != gain[c]:
            continue
        group[c] = gid
        excess -= 1
        for k in range(indptr[c], indptr[c + 1]):
            j = indices[k]
            if group[j] == new_gid:
                gain[j] += 1
                heapq.heappush(heap, (-gain[j], seq, j))
                seq += 1


@numba.njit(cache=True)
def _stray(indptr, indices, group, members, label):
    """Number of ``members`` labeled ``label`` outside the largest such component."""
    seen = np.zeros(group.shape[0], dtype=np.bool_)
    queue = np.empty(members.shape[0], dtype=np.int64)
    total, best = 0, 0
    for s in members:
        if group[s] != label or seen[s]:
            continue
        seen[s] = True
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            c = queue[head]
            head += 1
            for k in range(indptr[c], indptr[c + 1]):
                j = indices[k]
                if group[j] == label and not seen[j]:
                    seen[j] = True
                    queue[tail] = j
                    tail += 1
        total += tail
        best = max(best, tail)
    return total - best


@numba.njit(cache=True)
def _repair(indptr, indices, part, n_parts):
    """Hand every component of a part except its largest to the best neighboring part.

    Returns the number of cells moved.
    """
    n = part.shape[0]
    comp = -np.ones(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    sizes = np.zeros(n, dtype=np.int64)
    owner = np.zeros(n, dtype=np.int64)
    nc = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = nc
        queue[0] = s
        head, tail = 0, 1
        while head < tail:
            c = queue[head]
            head += 1
            for k in range(indptr[c], indptr[c + 1]):
                j = indices[k]
                if comp[j] < 0 and part[j] == part[s]:
                    comp[j] = nc
                    queue[tail] = j
                    tail += 1
        sizes[nc] = tail
        owner[nc] = part[s]
        nc += 1
    best = -np.ones(n_parts, dtype=np.int64)
    for c in range(nc):
        p = owner[c]
        if best[p] < 0 or sizes[c] > sizes[best[p]]:
            best[p] = c
    votes = np.zeros(n_parts, dtype=np.int64)
    moved = 0
    for c in range(nc):
        if best[owner[c]] == c:
            continue
        for i in range(n):
            if comp[i] == c:
                for k in range(indptr[i], indptr[i + 1]):
                    j = indices[k]
                    if comp[j] != c:
                        votes[part[j]] += 1
        target = np.argmax(votes)
        if votes[target] == 0:
            continue
        for i in range(n):
            if comp[i] == c:
                part[i] = target
                moved += 1
        votes[:] = 0
    return moved


@numba.njit(cache=True)
def _balance(indptr, indices, part, n_parts, max_sweeps):
    """Move boundary cells from larger to smaller neighboring parts.

    A cell moves from part ``p`` to an adjacent part ``q`` when ``p`` is at
    least two cells larger and stays connected without it.  Returns the
    number of moves made.
    """
    n = part.shape[0]
    size = np.zeros(n_parts, dtype=np.int64)
    for i in range(n):
        size[part[i]] += 1
    stamp = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    tick = 0
    moves = 0
    for _ in range(max_sweeps):
        moved = 0
        for c in range(n):
            p = part[c]
            q = -1
            for k in range(indptr[c], indptr[c + 1]):
                r = part[indices[k]]
                if r != p and size[p] - size[r] >= 2 and (q < 0 or size[r] < size[q]):
                    q = r
            if q < 0:
                continue
            # does p stay connected without c?
            start = -1
            for k in range(indptr[c], indptr[c + 1]):
                if part[indices[k]] == p:
                    start = indices[k]
                    break
            if start < 0:
                continue
            tick += 1
            stamp[c] = tick
            stamp[start] = tick
            queue[0] = start
            head, tail = 0, 1
            while head < tail:
                u = queue[head]
                head += 1
                for k in range(indptr[u], indptr[u + 1]):
                    j = indices[k]
                    if part[j] == p and stamp[j] != tick:
                        stamp[j] = tick
                        queue[tail] = j
                        tail += 1
            if tail != size[p] - 1:
                continue
            part[c] = q
            size[p] -= 1
            size[q] += 1
            moved += 1
        moves += moved
        if moved == 0:
            break
    return moves


def partition(mesh, n_parts, rng_seed=0):
    """Split the cells of ``mesh`` into ``n_parts`` balanced, mostly connected parts.

    Recursive graph-growing bisection on the cell adjacency graph: a region
    is grown breadth-first from a pseudo-peripheral cell (found by two
    farthest-cell sweeps from a randomly drawn cell) until it holds its share
    of cells, and both halves are split again until ``n_parts`` parts exist.
    Each bisection keeps the left-behind half in one piece where it can and
    tries a few starting cells, keeping the split with the fewest stray cells.
    Stray pieces that survive are merged into a neighboring part, and a last
    pass moves boundary cells from larger to smaller neighbors while keeping
    every part connected.  Labels are renumbered in order of
    first appearance.
    """
    n = mesh.n_cells
    n_parts = int(n_parts)
    if not 1 <= n_parts <= n:
        raise InvalidParameterError(f"part count must be in [1, {n}], got {n_parts}")
    if n_parts == n:
        return Partition(np.arange(n, dtype=np.int64), n)

    indptr, indices = mesh.cell_graph
    rng = np.random.default_rng(rng_seed)
    group = np.zeros(n, dtype=np.int64)
    stamp = np.zeros(n, dtype=np.int64)
    gain = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    tick = 0
    next_gid = 1
    stack = [(0, n_parts)]
    while stack:
        gid, parts = stack.pop()
        if parts == 1:
            continue
        members = np.flatnonzero(group == gid)
        left = parts // 2
        target = members.size * left // parts
        best, best_split = None, None
        for _ in range(TRIES if members.size > 2000 else 4 * TRIES):
            start = int(members[rng.integers(members.size)])
            for _ in range(2):
                tick += 1
                start = _farthest(indptr, indices, group, gid, start, stamp, tick)
            taken = _grow(indptr, indices, group, gid, start, target, next_gid, gain, order)
            _settle(indptr, indices, group, gid, next_gid, order, taken)
            score = (_stray(indptr, indices, group, members, gid)
                     + _stray(indptr, indices, group, members, next_gid))
            if best is None or score < best:
                best, best_split = score, group[members].copy()
            group[members] = gid
            if score == 0:
                break
        group[members] = best_split
        stack.append((gid, parts - left))
        stack.append((next_gid, left))
        next_gid += 1

    for _ in range(10):
        if _repair(indptr, indices, group, next_gid) == 0:
            break

    _balance(indptr, indices, group, next_gid, 50)

    _, first = np.unique(group, return_index=True)
    relabel = np.empty(group.max() + 1, dtype=np.int64)
    relabel[group[np.sort(first)]] = np.arange(first.size)
    return Partition(relabel[group], n_parts)

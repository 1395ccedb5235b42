"""Combinatorial substrate: edges, triangles, boundary matrices, incidence counts.

Vertices are 1-based. Edges ``(a, b)`` and triangles ``(a, b, c)`` are sorted
tuples, and every indexed object uses the lexicographic order produced by
``itertools.combinations(range(1, n + 1), k)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, InvalidDimensionError

Edge = tuple[int, int]
Triangle = tuple[int, int, int]

# sign of row sigma \ {x_i} in the column of sigma = (x0, x1, x2)
BOUNDARY_SIGNS = np.array([1, -1, 1], dtype=np.int64)


def check_n(n: int, minimum: int = 3) -> None:
    if int(n) != n or n < minimum:
        raise InvalidDimensionError(f"need n >= {minimum}, got {n!r}")


# ---------------------------------------------------------------------------
# indexing
# ---------------------------------------------------------------------------

def num_edges(n: int) -> int:
    return comb(n, 2)


def num_triangles(n: int) -> int:
    return comb(n, 3)


@lru_cache(maxsize=64)
def edge_array(n: int) -> np.ndarray:
    """All edges of K_n as an ``(C(n,2), 2)`` array in lexicographic order."""
    out = np.array(list(itertools.combinations(range(1, n + 1), 2)), dtype=np.int64)
    out = out.reshape(-1, 2)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=16)
def triangle_array(n: int) -> np.ndarray:
    """All triangles on [n] as an ``(C(n,3), 3)`` array in lexicographic order."""
    i, j, k = _triangle_columns(n)
    out = np.stack([i, j, k], axis=1) + 1
    out.flags.writeable = False
    return out


def _triangle_columns(n: int):
    if n < 3:
        z = np.zeros(0, dtype=np.int64)
        return z, z, z
    # expand (i, j, k) with i < j < k without materialising n^3 candidates
    ii, jj = np.triu_indices(n, 1)
    counts = n - 1 - jj
    i = np.repeat(ii, counts)
    j = np.repeat(jj, counts)
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    k = np.arange(counts.sum(), dtype=np.int64) - starts + j + 1
    # np.triu_indices is row-major, which is already lexicographic in (i, j)
    return i, j, k


def edge_index(n: int, a, b):
    """Lexicographic index of edge ``{a, b}`` (1-based vertices, a < b).

    Works elementwise on numpy arrays.
    """
    i = np.asarray(a, dtype=np.int64) - 1
    j = np.asarray(b, dtype=np.int64) - 1
    out = i * (2 * n - i - 1) // 2 + (j - i - 1)
    return int(out) if out.ndim == 0 else out


def _c2(x):
    return x * (x - 1) // 2


def _c3(x):
    return x * (x - 1) * (x - 2) // 6


def triangle_index(n: int, a, b, c):
    """Lexicographic index of triangle ``{a, b, c}`` (1-based, a < b < c)."""
    i = np.asarray(a, dtype=np.int64) - 1
    j = np.asarray(b, dtype=np.int64) - 1
    k = np.asarray(c, dtype=np.int64) - 1
    out = _c3(n) - _c3(n - i) + _c2(n - i - 1) - _c2(n - j) + (k - j - 1)
    return int(out) if out.ndim == 0 else out


def _check_edge(n: int, e) -> Edge:
    a, b = (int(x) for x in e)
    if not 1 <= a < b <= n:
        raise IndexError(f"edge {e!r} is not a sorted pair in [1, {n}]")
    return a, b


def _check_triangle(n: int, t) -> Triangle:
    a, b, c = (int(x) for x in t)
    if not 1 <= a < b < c <= n:
        raise IndexError(f"triangle {t!r} is not a sorted triple in [1, {n}]")
    return a, b, c


def normalize_edges(n: int, G: Iterable) -> list[Edge]:
    """Sort each pair, validate, deduplicate and order lexicographically."""
    out = set()
    for e in G:
        a, b = sorted(int(x) for x in e)
        out.add(_check_edge(n, (a, b)))
    return sorted(out)


def edge_indicator(n: int, G: Iterable) -> np.ndarray:
    """0/1 vector over the edges of K_n marking the edges of ``G``."""
    ind = np.zeros(num_edges(n), dtype=np.uint8)
    edges = normalize_edges(n, G)
    if edges:
        e = np.array(edges, dtype=np.int64)
        ind[edge_index(n, e[:, 0], e[:, 1])] = 1
    return ind


# ---------------------------------------------------------------------------
# complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Complex2:
    """2-dimensional complex on [n] with complete 1-skeleton.

    ``triangles`` is stored sorted and duplicate-free; construct through
    :meth:`from_triangles` to get normalisation, or pass an already sorted
    tuple directly.
    """

    n: int
    triangles: tuple[Triangle, ...] = field(default=())

    def __post_init__(self):
        check_n(self.n)
        prev = None
        for t in self.triangles:
            _check_triangle(self.n, t)
            if prev is not None and not prev < t:
                raise ValueError("triangles must be strictly increasing (sorted, no duplicates)")
            prev = t

    @classmethod
    def from_triangles(cls, n: int, triangles: Iterable) -> "Complex2":
        tris = {tuple(sorted(int(x) for x in t)) for t in triangles}
        return cls(n, tuple(sorted(tris)))

    @classmethod
    def from_indices(cls, n: int, idx) -> "Complex2":
        idx = np.unique(np.asarray(idx, dtype=np.int64))
        tri = triangle_array(n)[idx]
        return cls(n, tuple(map(tuple, tri.tolist())))

    @cached_property
    def columns(self) -> np.ndarray:
        """Lexicographic indices of the triangles, increasing."""
        if not self.triangles:
            return np.zeros(0, dtype=np.int64)
        t = np.array(self.triangles, dtype=np.int64)
        out = triangle_index(self.n, t[:, 0], t[:, 1], t[:, 2])
        out = np.atleast_1d(out)
        out.flags.writeable = False
        return out

    def __len__(self) -> int:
        return len(self.triangles)

    def __contains__(self, t) -> bool:
        return tuple(t) in set(self.triangles)


@dataclass(frozen=True)
class SignedBoundaryMatrix:
    """Sparse matrix of the boundary map from triangles to edges of the simplex.

    Column ``j`` (triangle ``x0 < x1 < x2``) has entry ``(-1)**i`` in the row of
    the edge obtained by deleting ``x_i``. ``col_rows[j, i]`` stores that row.
    """

    n: int
    col_rows: np.ndarray = field(repr=False)

    @property
    def shape(self) -> tuple[int, int]:
        return num_edges(self.n), num_triangles(self.n)

    def column(self, j: int) -> dict[int, int]:
        return {int(r): int(s) for r, s in zip(self.col_rows[j], BOUNDARY_SIGNS)}

    def toarray(self, columns=None) -> np.ndarray:
        cols = np.arange(self.shape[1]) if columns is None else np.asarray(columns, dtype=np.int64)
        out = np.zeros((self.shape[0], len(cols)), dtype=np.int64)
        jj = np.arange(len(cols))
        for i in range(3):
            out[self.col_rows[cols, i], jj] = BOUNDARY_SIGNS[i]
        return out


@lru_cache(maxsize=16)
def full_boundary(n: int) -> SignedBoundaryMatrix:
    check_n(n)
    i, j, k = _triangle_columns(n)
    # rows: sigma \ {x0} = (j,k), sigma \ {x1} = (i,k), sigma \ {x2} = (i,j)
    rows = np.stack([
        edge_index(n, j + 1, k + 1),
        edge_index(n, i + 1, k + 1),
        edge_index(n, i + 1, j + 1),
    ], axis=1).astype(np.int64)
    rows.flags.writeable = False
    return SignedBoundaryMatrix(n, rows)


def boundary_submatrix(M: SignedBoundaryMatrix, X: Iterable, Y: Iterable) -> np.ndarray:
    """Dense integer submatrix ``M[X, Y]`` with rows/columns in lexicographic order."""
    n = M.n
    X = sorted({_check_edge(n, e) for e in X})
    Y = sorted({_check_triangle(n, t) for t in Y})
    if not Y:
        return np.zeros((len(X), 0), dtype=np.int64)
    t = np.array(Y, dtype=np.int64)
    cols = np.atleast_1d(triangle_index(n, t[:, 0], t[:, 1], t[:, 2]))
    return _restrict(M, _row_positions(n, X), cols)


def _row_positions(n: int, X: Sequence[Edge]) -> np.ndarray:
    pos = np.full(num_edges(n), -1, dtype=np.int64)
    if X:
        e = np.array(X, dtype=np.int64)
        pos[np.atleast_1d(edge_index(n, e[:, 0], e[:, 1]))] = np.arange(len(X))
    return pos


def _restrict(M: SignedBoundaryMatrix, pos: np.ndarray, cols: np.ndarray) -> np.ndarray:
    nrows = int((pos >= 0).sum())
    out = np.zeros((nrows, len(cols)), dtype=np.int64)
    jj = np.arange(len(cols))
    for i in range(3):
        r = pos[M.col_rows[cols, i]]
        keep = r >= 0
        out[r[keep], jj[keep]] = BOUNDARY_SIGNS[i]
    return out


def star_tree(n: int) -> list[Edge]:
    """Spanning star at vertex 1."""
    check_n(n, 2)
    return [(1, v) for v in range(2, n + 1)]


def tree_complement(n: int, F: Iterable | None = None) -> list[Edge]:
    """Edges of K_n outside the spanning tree ``F`` (default: the star)."""
    F = set(normalize_edges(n, star_tree(n) if F is None else F))
    if len(F) != n - 1:
        raise ValueError("F must have n - 1 edges")
    return [e for e in map(tuple, edge_array(n).tolist()) if e not in F]


@lru_cache(maxsize=32)
def reduced_boundary(n: int) -> np.ndarray:
    """Dense ``I_n[X, all triangles]`` for X the star-tree complement.

    Only sensible at moderate n (it has ``C(n-1,2) * C(n,3)`` entries).
    """
    M = full_boundary(n)
    out = _restrict(M, _row_positions(n, tree_complement(n)), np.arange(num_triangles(n)))
    out.flags.writeable = False
    return out


def star_reduced_rows(n: int) -> np.ndarray:
    """Map edge index -> row in the star-complement numbering, -1 for star edges."""
    return _star_pos(n)


@lru_cache(maxsize=64)
def _star_pos(n: int) -> np.ndarray:
    pos = _row_positions(n, tree_complement(n))
    pos.flags.writeable = False
    return pos


def vertex_boundary(n: int) -> np.ndarray:
    """Signed ``n x C(n,2)`` matrix of the boundary from edges to vertices."""
    E = edge_array(n)
    out = np.zeros((n, len(E)), dtype=np.int64)
    jj = np.arange(len(E))
    out[E[:, 1] - 1, jj] = 1
    out[E[:, 0] - 1, jj] = -1
    return out


# ---------------------------------------------------------------------------
# cochains and incidence counts
# ---------------------------------------------------------------------------

def coboundary_mask(n: int, G: Iterable) -> np.ndarray:
    """Boolean mask over all triangles: odd number of edges in ``G``."""
    check_n(n)
    ind = edge_indicator(n, G)
    rows = full_boundary(n).col_rows
    return (ind[rows].sum(axis=1) & 1).astype(bool)


def graph_coboundary(n: int, G: Iterable) -> frozenset[Triangle]:
    mask = coboundary_mask(n, G)
    return frozenset(map(tuple, triangle_array(n)[mask].tolist()))


def cut_edges(n: int, U: Iterable[int]) -> list[Edge]:
    U = set(U)
    return [(a, b) for a, b in itertools.combinations(range(1, n + 1), 2) if (a in U) != (b in U)]


def t_count_array(n: int, Y) -> np.ndarray:
    """``t_Y`` as a vector over the edges of K_n.

    ``Y`` may be a :class:`Complex2`, an iterable of triangles, or a boolean
    mask over all triangles.
    """
    check_n(n)
    rows = full_boundary(n).col_rows
    if isinstance(Y, Complex2):
        cols = Y.columns
    elif isinstance(Y, np.ndarray) and Y.dtype == bool:
        cols = np.flatnonzero(Y)
    else:
        tris = [_check_triangle(n, t) for t in Y]
        if not tris:
            return np.zeros(num_edges(n), dtype=np.int64)
        t = np.array(sorted(set(tris)), dtype=np.int64)
        cols = np.atleast_1d(triangle_index(n, t[:, 0], t[:, 1], t[:, 2]))
    return np.bincount(rows[cols].ravel(), minlength=num_edges(n)).astype(np.int64)


def t_counts(n: int, Y) -> dict[Edge, int]:
    counts = t_count_array(n, Y)
    return {tuple(e): int(c) for e, c in zip(edge_array(n).tolist(), counts)}


def is_cocycle(K: Complex2, G: Iterable) -> bool:
    """True iff every triangle of ``K`` contains an even number of ``G``-edges."""
    ind = edge_indicator(K.n, G)
    if not len(K):
        return True
    rows = full_boundary(K.n).col_rows[K.columns]
    return not np.any(ind[rows].sum(axis=1) & 1)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def format_complex(K: Complex2) -> str:
    lines = [f"{K.n} {len(K.triangles)}"]
    lines += [f"{a} {b} {c}" for a, b, c in K.triangles]
    return "\n".join(lines) + "\n"


def parse_complex(text: str) -> Complex2:
    """Parse ``n m`` followed by ``m`` sorted triples, rejecting disorder."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise FormatError("first line must be 'n m'")
    try:
        n, m = (int(x) for x in rows[0])
        tris = [tuple(int(x) for x in r) for r in rows[1:]]
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if n < 3:
        raise FormatError(f"n must be >= 3, got {n}")
    if len(tris) != m:
        raise FormatError(f"header announces {m} triangles, found {len(tris)}")
    prev = None
    for t in tris:
        if len(t) != 3 or not 1 <= t[0] < t[1] < t[2] <= n:
            raise FormatError(f"bad triangle {t!r}")
        if prev is not None:
            if t == prev:
                raise FormatError(f"duplicate triangle {t!r}")
            if t < prev:
                raise FormatError(f"triangles not sorted at {t!r}")
        prev = t
    return Complex2(n, tuple(tris))


def read_complex(path) -> Complex2:
    return parse_complex(Path(path).read_text())


def write_complex(path, K: Complex2) -> None:
    Path(path).write_text(format_complex(K))


def format_graph(n: int, G: Iterable) -> str:
    edges = normalize_edges(n, G)
    return "\n".join([f"{n} {len(edges)}"] + [f"{a} {b}" for a, b in edges]) + "\n"


def parse_graph(text: str) -> tuple[int, list[Edge]]:
    """Graph file: ``n m`` then ``m`` lines ``a b`` with ``a < b``."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise FormatError("first line must be 'n m'")
    try:
        n, m = (int(x) for x in rows[0])
        edges = [tuple(int(x) for x in r) for r in rows[1:]]
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    if len(edges) != m:
        raise FormatError(f"header announces {m} edges, found {len(edges)}")
    for e in edges:
        if len(e) != 2 or not 1 <= e[0] < e[1] <= n:
            raise FormatError(f"bad edge {e!r}")
    if len(set(edges)) != len(edges):
        raise FormatError("duplicate edge")
    return n, sorted(edges)


def read_graph(path) -> tuple[int, list[Edge]]:
    return parse_graph(Path(path).read_text())


def all_graphs(n: int):
    """Yield every graph on [n] as a list of edges (2**C(n,2) of them)."""
    E = list(map(tuple, edge_array(n).tolist()))
    for mask in range(1 << len(E)):
        yield [E[i] for i in range(len(E)) if mask >> i & 1]


def graph_from_mask(n: int, mask: int) -> list[Edge]:
    E = edge_array(n).tolist()
    return [tuple(E[i]) for i in range(len(E)) if mask >> i & 1]


# The 6-vertex triangulation of the real projective plane.
RP2_6 = (
    (1, 2, 4), (1, 2, 6), (1, 3, 5), (1, 3, 6), (1, 4, 5),
    (2, 3, 4), (2, 3, 5), (2, 5, 6), (3, 4, 6), (4, 5, 6),
)


def projective_plane() -> Complex2:
    return Complex2(6, RP2_6)


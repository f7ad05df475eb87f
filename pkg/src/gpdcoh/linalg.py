"""Sparse exact-rational linear algebra.

All arithmetic is over ``fractions.Fraction``; no floating point anywhere.
Elimination uses a fixed pivot rule (columns processed left to right, pivot =
first nonzero row in index order), so every result is deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"not an exact rational: {value!r}")


def _axpy(dst: dict, src: dict, c: Fraction) -> None:
    # dst += c * src, dropping entries that cancel to zero
    for i, v in src.items():
        w = dst.get(i, ZERO) + c * v
        if w:
            dst[i] = w
        else:
            dst.pop(i, None)


class RationalMatrix:
    """Rational matrix stored column-major as sparse row->value dicts."""

    __slots__ = ("rows", "cols", "columns")

    def __init__(self, rows: int, cols: int, columns=None):
        self.rows = rows
        self.cols = cols
        if columns is None:
            columns = [dict() for _ in range(cols)]
        self.columns = columns

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int) -> "RationalMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        m = cls(n, n)
        for j in range(n):
            m.columns[j][j] = ONE
        return m

    @classmethod
    def from_rows(cls, rowdata: Sequence[Sequence]) -> "RationalMatrix":
        rows = len(rowdata)
        cols = len(rowdata[0]) if rows else 0
        m = cls(rows, cols)
        for i, row in enumerate(rowdata):
            if len(row) != cols:
                raise ValueError("ragged row data")
            for j, v in enumerate(row):
                f = as_fraction(v)
                if f:
                    m.columns[j][i] = f
        return m

    @classmethod
    def from_entries(cls, rows: int, cols: int,
                     entries: Iterable[tuple[int, int, object]]) -> "RationalMatrix":
        m = cls(rows, cols)
        for i, j, v in entries:
            f = as_fraction(v)
            if f:
                m.columns[j][i] = f
        return m

    # -- element access ------------------------------------------------

    def get(self, i: int, j: int) -> Fraction:
        return self.columns[j].get(i, ZERO)

    def set(self, i: int, j: int, value) -> None:
        f = as_fraction(value)
        if f:
            self.columns[j][i] = f
        else:
            self.columns[j].pop(i, None)

    def column(self, j: int) -> dict:
        return self.columns[j]

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def copy(self) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, [dict(c) for c in self.columns])

    # -- algebra ---------------------------------------------------------

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        out = RationalMatrix(self.rows, other.cols)
        mycols = self.columns
        for j, col in enumerate(other.columns):
            dst = out.columns[j]
            for i, v in col.items():
                _axpy(dst, mycols[i], v)
        return out

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        out = self.copy()
        for j, col in enumerate(other.columns):
            _axpy(out.columns[j], col, ONE)
        return out

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        self._same_shape(other)
        out = self.copy()
        for j, col in enumerate(other.columns):
            _axpy(out.columns[j], col, -ONE)
        return out

    def __neg__(self) -> "RationalMatrix":
        return self.scale(-ONE)

    def scale(self, c) -> "RationalMatrix":
        f = as_fraction(c)
        out = RationalMatrix(self.rows, self.cols)
        if f:
            for j, col in enumerate(self.columns):
                out.columns[j] = {i: f * v for i, v in col.items()}
        return out

    def apply(self, vec: dict) -> dict:
        """Matrix-vector product on a sparse column vector."""
        out: dict = {}
        for i, v in vec.items():
            _axpy(out, self.columns[i], v)
        return out

    def transpose(self) -> "RationalMatrix":
        out = RationalMatrix(self.cols, self.rows)
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out.columns[i][j] = v
        return out

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and \
            self.columns == other.columns

    def __hash__(self):
        raise TypeError("RationalMatrix is unhashable")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    # -- serialization -----------------------------------------------------

    def to_triplets(self) -> list[list]:
        """Entries as [row, col, "p/q"] triplets in deterministic order."""
        out = []
        for j, col in enumerate(self.columns):
            for i in sorted(col):
                out.append([i, j, str(col[i])])
        return out

    def to_dense(self) -> list[list[Fraction]]:
        dense = [[ZERO] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                dense[i][j] = v
        return dense

    def __repr__(self):
        return f"RationalMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


class Echelon:
    """Incremental column echelon form with combination tracking.

    Pivot columns are kept in insertion order; each new pivot is fully
    reduced against earlier pivots, which makes single-pass reduction
    correct (a later pivot never has support on an earlier pivot row).
    """

    __slots__ = ("rows", "pivots", "track")

    def __init__(self, rows: int, track: bool = True):
        self.rows = rows
        self.pivots: list[tuple[int, dict, dict | None]] = []
        self.track = track

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, col: dict, combo: dict | None = None) -> tuple[dict, dict | None]:
        v = dict(col)
        c = dict(combo) if combo is not None else (dict() if self.track else None)
        for prow, pcol, pcombo in self.pivots:
            f = v.get(prow)
            if f:
                _axpy(v, pcol, -f)
                if c is not None and pcombo is not None:
                    _axpy(c, pcombo, -f)
        return v, c

    def insert(self, col: dict, tag=None) -> tuple[bool, dict | None]:
        """Reduce and insert; returns (is_new_pivot, combination-if-dependent)."""
        combo = {tag: ONE} if (self.track and tag is not None) else None
        v, c = self.reduce(col, combo)
        if not v:
            return False, c
        prow = min(v)
        inv = ONE / v[prow]
        if inv != ONE:
            v = {i: inv * w for i, w in v.items()}
            if c is not None:
                c = {k: inv * w for k, w in c.items()}
        self.pivots.append((prow, v, c))
        return True, None


class RankData:
    """rank / kernel / image decomposition of a matrix.

    kernel: cols x (cols - rank), exact basis of the null space.
    image: rows x rank, basis of the column span.
    preimage: cols x rank with  M * preimage == image  exactly.
    """

    __slots__ = ("rank", "kernel", "image", "preimage")

    def __init__(self, rank, kernel, image, preimage):
        self.rank = rank
        self.kernel = kernel
        self.image = image
        self.preimage = preimage


def rank_kernel_image(m: RationalMatrix) -> RankData:
    """Deterministic sparse Gaussian elimination over the rationals."""
    ech = Echelon(m.rows, track=True)
    kernel_cols: list[dict] = []
    image_cols: list[dict] = []
    preimage_cols: list[dict] = []
    for j in range(m.cols):
        isnew, combo = ech.insert(m.columns[j], tag=j)
        if not isnew:
            kernel_cols.append(combo)
        else:
            prow, pcol, pcombo = ech.pivots[-1]
            image_cols.append(pcol)
            preimage_cols.append(pcombo)
    rank = len(image_cols)
    kernel = RationalMatrix(m.cols, len(kernel_cols), [dict(c) for c in kernel_cols])
    image = RationalMatrix(m.rows, rank, [dict(c) for c in image_cols])
    preimage = RationalMatrix(m.cols, rank, [dict(c) for c in preimage_cols])
    return RankData(rank, kernel, image, preimage)


def rank(m: RationalMatrix) -> int:
    """Rank only; skips combination tracking."""
    ech = Echelon(m.rows, track=False)
    for j in range(m.cols):
        ech.insert(m.columns[j])
    return ech.rank


class ChainMapError(ValueError):
    """A map failed to preserve cycles or boundaries; carries a witness column."""

    def __init__(self, message, witness_column=None):
        super().__init__(message)
        self.witness_column = witness_column


class SubquotientBasis:
    """ker/im presentation of one cohomology degree.

    cycles: ambient x z matrix whose columns span the kernel.
    boundaries: ambient x b matrix whose columns span the incoming image.
    Representatives of the quotient are the cycle columns that extend the
    boundary columns to a basis; `coords` expresses a cycle in them.
    """

    def __init__(self, ambient: int, cycles: RationalMatrix, boundaries: RationalMatrix):
        if cycles.rows != ambient or boundaries.rows != ambient:
            raise ValueError("ambient dimension mismatch")
        self.ambient = ambient
        self.cycles = cycles
        self.boundaries = boundaries
        self._bnd_ech = Echelon(ambient, track=False)
        for j in range(boundaries.cols):
            self._bnd_ech.insert(boundaries.columns[j])
        self._full_ech = Echelon(ambient, track=True)
        for j in range(boundaries.cols):
            isnew, _ = self._full_ech.insert(boundaries.columns[j], tag=("b", j))
            if not isnew:
                raise ValueError("boundary basis is not independent")
        self.representatives: list[int] = []
        for j in range(cycles.cols):
            isnew, _ = self._full_ech.insert(cycles.columns[j], tag=("r", len(self.representatives)))
            if isnew:
                self.representatives.append(j)
        self.dim = len(self.representatives)
        if self.dim != cycles.cols - boundaries.cols:
            raise ChainMapError("boundaries do not lie in the cycle span")

    def representative_matrix(self) -> RationalMatrix:
        cols = [dict(self.cycles.columns[j]) for j in self.representatives]
        return RationalMatrix(self.ambient, self.dim, cols)

    def coords(self, vec: dict) -> list[Fraction]:
        """Coordinates of a cycle's class in the representative basis."""
        residual, combo = self._full_ech.reduce(vec, {})
        if residual:
            raise ChainMapError("vector is not in the cycle span")
        out = [ZERO] * self.dim
        for tag, c in combo.items():
            kind, idx = tag
            if kind == "r":
                out[idx] = -c
        return out

    def contains_boundary(self, vec: dict) -> bool:
        residual, _ = self._bnd_ech.reduce(vec, None)
        return not residual


def induced_quotient_map(f: RationalMatrix, dom: SubquotientBasis,
                         cod: SubquotientBasis) -> tuple[RationalMatrix, bool]:
    """Matrix of the map induced on subquotients, plus an is-isomorphism flag.

    Validates that f carries domain cycles into codomain cycles and domain
    boundaries into codomain boundaries, raising ChainMapError with the
    offending column otherwise.
    """
    if f.cols != dom.ambient or f.rows != cod.ambient:
        raise ValueError("shape mismatch with subquotient ambients")
    for j in range(dom.boundaries.cols):
        img = f.apply(dom.boundaries.columns[j])
        if not cod.contains_boundary(img):
            raise ChainMapError("boundary not preserved", witness_column=j)
    cols = []
    for j in dom.representatives:
        img = f.apply(dom.cycles.columns[j])
        try:
            coords = cod.coords(img)
        except ChainMapError as e:
            raise ChainMapError("cycle not preserved", witness_column=j) from e
        cols.append({i: c for i, c in enumerate(coords) if c})
    matrix = RationalMatrix(cod.dim, len(cols), cols)
    is_iso = matrix.rows == matrix.cols and rank(matrix) == matrix.rows
    return matrix, is_iso


def pullback_matrix(fmap: Sequence[int], dom_size: int, cod_size: int) -> RationalMatrix:
    """Pullback of functions along a map of finite sets.

    For f: X -> Y the matrix of f*: Fun(Y) -> Fun(X) has a single 1 per row.
    """
    if len(fmap) != dom_size:
        raise ValueError("map length disagrees with domain size")
    m = RationalMatrix(dom_size, cod_size)
    for x, y in enumerate(fmap):
        m.columns[y][x] = ONE
    return m

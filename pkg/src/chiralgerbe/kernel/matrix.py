"""Dense matrices over QQ(x1..xn) and the Jacobian of a coordinate change."""
from __future__ import annotations

from typing import Callable, Sequence

from ..errors import AmbientMismatchError, NonInvertibleChangeError, NonInvertibleError
from .ratfunc import RatFunc


class RatMatrix:
    __slots__ = ("nvars", "rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[RatFunc]], nvars: int | None = None):
        rows = tuple(tuple(r) for r in entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        if nvars is None:
            nvars = next(e.nvars for r in rows for e in r if isinstance(e, RatFunc))
        self.nvars = nvars
        self.entries = tuple(
            tuple(e if isinstance(e, RatFunc) else RatFunc.const(nvars, e) for e in r)
            for r in rows)
        self.rows = len(rows)
        self.cols = len(rows[0])

    @classmethod
    def identity(cls, nvars: int, size: int) -> "RatMatrix":
        return cls([[1 if i == j else 0 for j in range(size)] for i in range(size)], nvars)

    @classmethod
    def zeros(cls, nvars: int, rows: int, cols: int) -> "RatMatrix":
        return cls([[0] * cols for _ in range(rows)], nvars)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, RatMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in r) for r in self.entries)
        return f"RatMatrix[{body}]"

    def map(self, fn: Callable[[RatFunc], RatFunc]) -> "RatMatrix":
        return RatMatrix([[fn(e) for e in r] for r in self.entries], self.nvars)

    def transpose(self) -> "RatMatrix":
        return RatMatrix([[self.entries[i][j] for i in range(self.rows)]
                          for j in range(self.cols)], self.nvars)

    T = property(transpose)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix([[a + b for a, b in zip(r, s)]
                          for r, s in zip(self.entries, other.entries)], self.nvars)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix([[a - b for a, b in zip(r, s)]
                          for r, s in zip(self.entries, other.entries)], self.nvars)

    def __neg__(self):
        return self.map(lambda e: -e)

    def scale(self, c) -> "RatMatrix":
        return self.map(lambda e: e * c)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise AmbientMismatchError(f"shape mismatch {self.rows}x{self.cols} @ "
                                       f"{other.rows}x{other.cols}")
        zero = RatFunc.const(self.nvars, 0)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self.entries[i][k]
                    if a:
                        b = other.entries[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return RatMatrix(out, self.nvars)

    def trace(self) -> RatFunc:
        acc = RatFunc.const(self.nvars, 0)
        for i in range(min(self.rows, self.cols)):
            acc = acc + self.entries[i][i]
        return acc

    def partial(self, i: int) -> "RatMatrix":
        return self.map(lambda e: e.partial(i))

    def subs(self, values) -> "RatMatrix":
        values = list(values)
        return RatMatrix([[e.subs(values) for e in r] for r in self.entries], values[0].nvars)

    def is_zero(self) -> bool:
        return all(not e for r in self.entries for e in r)

    def det(self) -> RatFunc:
        if self.rows != self.cols:
            raise AmbientMismatchError("determinant of a non-square matrix")
        m = [list(r) for r in self.entries]
        n = self.rows
        det = RatFunc.const(self.nvars, 1)
        for c in range(n):
            pivot = next((r for r in range(c, n) if m[r][c]), None)
            if pivot is None:
                return RatFunc.const(self.nvars, 0)
            if pivot != c:
                m[c], m[pivot] = m[pivot], m[c]
                det = -det
            p = m[c][c]
            det = det * p
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] / p
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return det

    def inverse(self) -> "RatMatrix":
        return matrix_invert(self)


def matrix_invert(m: RatMatrix) -> RatMatrix:
    """Gauss-Jordan inverse; raises NonInvertibleError on a singular matrix."""
    if m.rows != m.cols:
        raise NonInvertibleError("only square matrices are invertible")
    n = m.rows
    one, zero = RatFunc.const(m.nvars, 1), RatFunc.const(m.nvars, 0)
    aug = [list(r) + [one if i == j else zero for j in range(n)]
           for i, r in enumerate(m.entries)]
    for c in range(n):
        pivot = next((r for r in range(c, n) if aug[r][c]), None)
        if pivot is None:
            raise NonInvertibleError("matrix is singular")
        aug[c], aug[pivot] = aug[pivot], aug[c]
        p = aug[c][c]
        aug[c] = [e / p for e in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return RatMatrix([row[n:] for row in aug], m.nvars)


def jacobian_of_map(new_coords: Sequence[RatFunc]) -> RatMatrix:
    """Frame matrix g of a coordinate change, in the old coordinates.

    ``new_coords[j]`` gives x'_{j+1} as a function of the old x.  The new
    coordinate fields satisfy d/dx'_i = sum_j g[i][j] d/dx_j, i.e.
    g[i][j] = dx_j/dx'_i, which is the transpose of the inverse of
    J[j][k] = dx'_j/dx_k.
    """
    new_coords = list(new_coords)
    n = len(new_coords)
    nvars = new_coords[0].nvars
    if nvars != n:
        raise NonInvertibleChangeError(f"{n} new coordinates for {nvars} old ones")
    J = RatMatrix([[f.partial(k) for k in range(1, n + 1)] for f in new_coords], nvars)
    try:
        inv = matrix_invert(J)
    except NonInvertibleError as exc:
        raise NonInvertibleChangeError("Jacobian determinant vanishes identically") from exc
    return inv.transpose()

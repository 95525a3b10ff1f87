"""Points of R^4, dense 4x4 matrices and affine maps over exact scalars."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .scalar import ONE, ZERO, Scalar, format_scalar, is_rational, parse_scalar, to_scalar

__all__ = [
    "Point4",
    "Mat4",
    "AffineMap",
    "SingularMap",
    "point",
    "vadd",
    "vsub",
    "vscale",
    "ORIGIN",
    "E_TIME",
    "apply",
    "compose",
    "inverse",
    "decompose_affine",
    "sq_euclidean_length",
    "sq_minkowski_length",
    "identity",
    "translation",
    "scaling",
    "linear_map",
    "parse_matrix_file",
]


class SingularMap(ArithmeticError):
    pass


class Point4(NamedTuple):
    """A spacetime event; ``t`` is the time component."""

    t: Scalar
    x: Scalar
    y: Scalar
    z: Scalar

    def __str__(self):
        return "(" + ", ".join(format_scalar(c) for c in self) + ")"


def point(*coords) -> Point4:
    if len(coords) == 1 and not isinstance(coords[0], (int, str)):
        coords = tuple(coords[0])
    if len(coords) != 4:
        raise ValueError(f"a point has four components, got {len(coords)}")
    return Point4(*(to_scalar(c) for c in coords))


def vadd(p: Point4, q: Point4) -> Point4:
    return Point4(p[0] + q[0], p[1] + q[1], p[2] + q[2], p[3] + q[3])


def vsub(p: Point4, q: Point4) -> Point4:
    return Point4(p[0] - q[0], p[1] - q[1], p[2] - q[2], p[3] - q[3])


def vscale(a, p: Point4) -> Point4:
    return Point4(a * p[0], a * p[1], a * p[2], a * p[3])


ORIGIN = Point4(ZERO, ZERO, ZERO, ZERO)
E_TIME = Point4(ONE, ZERO, ZERO, ZERO)


def sq_euclidean_length(p: Point4) -> Scalar:
    t, x, y, z = p
    return t * t + x * x + y * y + z * z


def sq_minkowski_length(p: Point4) -> Scalar:
    t, x, y, z = p
    return t * t - x * x - y * y - z * z


@dataclass(frozen=True)
class Mat4:
    """Dense 4x4 matrix, 16 entries in row-major order."""

    entries: tuple

    def __post_init__(self):
        if len(self.entries) != 16:
            raise ValueError("Mat4 needs 16 entries")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "Mat4":
        flat = [to_scalar(v) for row in rows for v in row]
        return cls(tuple(flat))

    @classmethod
    def identity(cls) -> "Mat4":
        return cls.diag(ONE, ONE, ONE, ONE)

    @classmethod
    def diag(cls, *d) -> "Mat4":
        d = [to_scalar(v) for v in d]
        e = [ZERO] * 16
        for i in range(4):
            e[5 * i] = d[i]
        return cls(tuple(e))

    @classmethod
    def zero(cls) -> "Mat4":
        return cls((ZERO,) * 16)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[4 * i + j]

    def row(self, i: int) -> tuple:
        return self.entries[4 * i : 4 * i + 4]

    def col(self, j: int) -> Point4:
        e = self.entries
        return Point4(e[j], e[4 + j], e[8 + j], e[12 + j])

    @property
    def rows(self) -> list[tuple]:
        return [self.row(i) for i in range(4)]

    def transpose(self) -> "Mat4":
        e = self.entries
        return Mat4(tuple(e[4 * j + i] for i in range(4) for j in range(4)))

    def scaled(self, a) -> "Mat4":
        return Mat4(tuple(a * v for v in self.entries))

    def is_rational(self) -> bool:
        return all(is_rational(v) for v in self.entries)

    def __matmul__(self, other):
        e = self.entries
        if isinstance(other, Mat4):
            f = other.entries
            out = []
            for i in range(4):
                a0, a1, a2, a3 = e[4 * i : 4 * i + 4]
                for j in range(4):
                    out.append(a0 * f[j] + a1 * f[4 + j] + a2 * f[8 + j] + a3 * f[12 + j])
            return Mat4(tuple(out))
        if isinstance(other, tuple) and len(other) == 4:
            t, x, y, z = other
            return Point4(
                e[0] * t + e[1] * x + e[2] * y + e[3] * z,
                e[4] * t + e[5] * x + e[6] * y + e[7] * z,
                e[8] * t + e[9] * x + e[10] * y + e[11] * z,
                e[12] * t + e[13] * x + e[14] * y + e[15] * z,
            )
        return NotImplemented

    def det(self) -> Scalar:
        return _det(self.rows)

    def inverse(self) -> "Mat4":
        d = self.det()
        if not d:
            raise SingularMap("matrix is singular")
        rows = self.rows
        inv_d = ONE / d
        out = [[ZERO] * 4 for _ in range(4)]
        for i in range(4):
            for j in range(4):
                minor = [[rows[r][c] for c in range(4) if c != j] for r in range(4) if r != i]
                cof = _det(minor)
                if (i + j) % 2:
                    cof = -cof
                # adjugate is the transposed cofactor matrix
                out[j][i] = cof * inv_d
        return Mat4(tuple(v for row in out for v in row))

    def __str__(self):
        return "\n".join(" ".join(format_scalar(v) for v in row) for row in self.rows)


def _det(rows: Sequence[Sequence]) -> Scalar:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ZERO
    for j, a in enumerate(rows[0]):
        if not a:
            continue
        minor = [row[:j] + row[j + 1 :] for row in rows[1:]]
        term = a * _det(minor)
        total = total - term if j % 2 else total + term
    return total


@dataclass(frozen=True)
class AffineMap:
    """``p -> linear @ p + translation``."""

    linear: Mat4
    translation: Point4

    def __call__(self, p: Point4) -> Point4:
        return apply(self, p)

    def is_bijective(self) -> bool:
        return bool(self.linear.det())

    def is_linear(self) -> bool:
        return not any(self.translation)

    def is_translation(self) -> bool:
        return self.linear == Mat4.identity()

    def to_json(self) -> dict:
        return {
            "linear": [[format_scalar(v) for v in row] for row in self.linear.rows],
            "translation": [format_scalar(v) for v in self.translation],
        }

    def __str__(self):
        return f"{self.linear}\n" + " ".join(format_scalar(v) for v in self.translation)


def identity() -> AffineMap:
    return AffineMap(Mat4.identity(), ORIGIN)


def translation(v) -> AffineMap:
    return AffineMap(Mat4.identity(), point(v) if not isinstance(v, Point4) else v)


def scaling(a) -> AffineMap:
    a = to_scalar(a)
    if not a:
        raise SingularMap("scaling factor must be nonzero")
    return AffineMap(Mat4.diag(a, a, a, a), ORIGIN)


def linear_map(m) -> AffineMap:
    if not isinstance(m, Mat4):
        m = Mat4.from_rows(m)
    return AffineMap(m, ORIGIN)


def apply(A: AffineMap, p: Point4) -> Point4:
    e = A.linear.entries
    c = A.translation
    t, x, y, z = p
    return Point4(
        e[0] * t + e[1] * x + e[2] * y + e[3] * z + c[0],
        e[4] * t + e[5] * x + e[6] * y + e[7] * z + c[1],
        e[8] * t + e[9] * x + e[10] * y + e[11] * z + c[2],
        e[12] * t + e[13] * x + e[14] * y + e[15] * z + c[3],
    )


def compose(A: AffineMap, B: AffineMap) -> AffineMap:
    """``A after B``: p -> A(B(p))."""
    return AffineMap(A.linear @ B.linear, apply(A, B.translation))


def inverse(A: AffineMap) -> AffineMap:
    inv = A.linear.inverse()
    neg = inv @ A.translation
    return AffineMap(inv, Point4(-neg[0], -neg[1], -neg[2], -neg[3]))


def decompose_affine(A: AffineMap) -> tuple[AffineMap, AffineMap]:
    """Split ``A`` into ``(tau, L)`` with ``A == compose(tau, L)``."""
    if not A.is_bijective():
        raise SingularMap("affine map is not bijective")
    tau = AffineMap(Mat4.identity(), apply(A, ORIGIN))
    lin = AffineMap(A.linear, ORIGIN)
    return tau, lin


def parse_matrix_file(text: str) -> AffineMap:
    """Parse the five-line matrix format: four rows, then the translation.

    Blank lines and lines starting with ``#`` are ignored.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if len(lines) != 5:
        raise ValueError(f"expected 5 data lines, found {len(lines)}")
    values = []
    for lineno, ln in enumerate(lines, 1):
        fields = ln.split()
        if len(fields) != 4:
            raise ValueError(f"data line {lineno}: expected 4 scalars, found {len(fields)}")
        values.append([parse_scalar(f) for f in fields])
    return AffineMap(Mat4.from_rows(values[:4]), Point4(*values[4]))

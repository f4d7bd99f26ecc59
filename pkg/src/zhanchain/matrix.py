"""Dense non-negative square matrices and the exact arithmetic built on them.

Every other module operates on :class:`Matrix`, an immutable row-major
wrapper around a float64 array whose entries are guaranteed finite and
non-negative.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

__all__ = [
    "MatrixError",
    "NegativeEntry",
    "NonFiniteEntry",
    "DimensionMismatch",
    "Matrix",
    "LogScaledTrace",
    "new_checked",
    "hadamard",
    "matmul",
    "entrywise_square",
    "power_log_scaled",
    "trace_of_power",
    "spectral_radius_2x2",
    "matrices_close",
    "read_matrix",
    "write_matrix",
    "parse_matrix_text",
    "format_matrix_text",
]

PathLike = Union[str, Path]


class MatrixError(ValueError):
    """Base class for invalid matrix input."""


class NegativeEntry(MatrixError):
    def __init__(self, i: int, j: int, value: float):
        super().__init__(f"negative entry {value!r} at ({i}, {j})")
        self.i, self.j, self.value = i, j, value


class NonFiniteEntry(MatrixError):
    def __init__(self, i: int, j: int, value: float):
        super().__init__(f"non-finite entry {value!r} at ({i}, {j})")
        self.i, self.j, self.value = i, j, value


class DimensionMismatch(MatrixError):
    pass


class Matrix:
    """Immutable n x n matrix with finite, non-negative entries.

    Use :func:`new_checked` or :meth:`from_array` to build one; both validate.
    ``entries`` is the row-major flattening, entry ``(i, j)`` at ``i * n + j``.
    """

    __slots__ = ("_a",)

    def __init__(self, array: np.ndarray):
        a = np.array(array, dtype=np.float64, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise DimensionMismatch(f"expected a non-empty square array, got shape {a.shape}")
        bad = ~np.isfinite(a)
        if bad.any():
            i, j = map(int, np.argwhere(bad)[0])
            raise NonFiniteEntry(i, j, float(a[i, j]))
        neg = a < 0
        if neg.any():
            i, j = map(int, np.argwhere(neg)[0])
            raise NegativeEntry(i, j, float(a[i, j]))
        a += 0.0  # -0.0 -> 0.0 so text round-trips are canonical
        a.setflags(write=False)
        self._a = a

    @classmethod
    def from_array(cls, array) -> "Matrix":
        return cls(np.asarray(array, dtype=np.float64))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Matrix":
        return cls(np.asarray(rows, dtype=np.float64))

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(np.eye(n))

    @classmethod
    def ones(cls, n: int) -> "Matrix":
        return cls(np.ones((n, n)))

    @classmethod
    def zeros(cls, n: int) -> "Matrix":
        return cls(np.zeros((n, n)))

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying (n, n) float64 array."""
        return self._a

    @property
    def entries(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self._a.ravel())

    def entry(self, i: int, j: int) -> float:
        return float(self._a[i, j])

    def max_entry(self) -> float:
        return float(self._a.max())

    def is_zero(self) -> bool:
        return not self._a.any()

    def is_positive(self) -> bool:
        return bool((self._a > 0).all())

    def tolist(self) -> list[list[float]]:
        return self._a.tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool((self._a == other._a).all())

    def __hash__(self) -> int:
        return hash((self.n, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"Matrix({self.tolist()!r})"


def new_checked(n: int, entries: Iterable[float]) -> Matrix:
    """Build a matrix from its dimension and row-major entries."""
    vals = list(entries)
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DimensionMismatch(f"dimension must be a positive integer, got {n!r}")
    if len(vals) != n * n:
        raise DimensionMismatch(f"expected {n * n} entries for n={n}, got {len(vals)}")
    return Matrix(np.asarray(vals, dtype=np.float64).reshape(n, n))


def _same_dim(a: Matrix, b: Matrix) -> None:
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")


def hadamard(a: Matrix, b: Matrix) -> Matrix:
    """Entrywise product ``(A o B)_ij = A_ij * B_ij``."""
    _same_dim(a, b)
    return Matrix(a.array * b.array)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    _same_dim(a, b)
    return Matrix(a.array @ b.array)


def entrywise_square(a: Matrix) -> Matrix:
    return Matrix(a.array * a.array)


@dataclass(frozen=True)
class LogScaledTrace:
    """A non-negative real stored as ``mantissa * exp(log_scale)``.

    After normalization the mantissa is 0 or lies in ``[1, e)`` and
    ``log_scale`` is an integer-valued float, which makes the
    representation of every nonzero value unique.
    """

    mantissa: float
    log_scale: float = 0.0

    @classmethod
    def normalize(cls, mantissa: float, log_scale: float = 0.0) -> "LogScaledTrace":
        if mantissa < 0 or not math.isfinite(mantissa) or not math.isfinite(log_scale):
            raise ValueError(f"cannot normalize ({mantissa!r}, {log_scale!r})")
        if mantissa == 0.0:
            return cls(0.0, 0.0)
        shift = math.floor(math.log(mantissa))
        m = mantissa / math.exp(shift)
        # log() can land one off at the boundaries of [1, e)
        if m >= math.e:
            shift += 1
            m = mantissa / math.exp(shift)
        elif m < 1.0:
            shift -= 1
            m = mantissa / math.exp(shift)
        scale = log_scale + shift
        whole = math.floor(scale)
        if whole != scale:
            # keep log_scale integral; fold the fractional part into the mantissa
            m *= math.exp(scale - whole)
            return cls.normalize(m, float(whole))
        return cls(m, float(scale))

    @classmethod
    def from_value(cls, value: float) -> "LogScaledTrace":
        return cls.normalize(float(value), 0.0)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0.0

    @property
    def value(self) -> float:
        """Expanded value; may overflow to ``inf`` or underflow to 0."""
        if self.mantissa == 0.0:
            return 0.0
        try:
            return self.mantissa * math.exp(self.log_scale)
        except OverflowError:
            return math.inf

    def log(self) -> float:
        """Natural log of the value (``-inf`` for zero)."""
        if self.mantissa == 0.0:
            return -math.inf
        return math.log(self.mantissa) + self.log_scale

    def root(self, m: int) -> float:
        """``value ** (1/m)`` computed without leaving the log domain."""
        if self.mantissa == 0.0:
            return 0.0
        r = self.mantissa ** (1.0 / m)
        if self.log_scale != 0.0:
            r *= math.exp(self.log_scale / m)
        return r

    def le(self, other: "LogScaledTrace", rtol: float = 0.0) -> bool:
        """``self <= other * (1 + rtol)``, decided on logs."""
        if self.is_zero:
            return True
        if other.is_zero:
            return False
        return self.log() <= other.log() + math.log1p(rtol)

    def isclose(self, value: float, rtol: float) -> bool:
        if self.is_zero or value == 0.0:
            return self.is_zero and value == 0.0
        if value < 0:
            return False
        return abs(math.expm1(self.log() - math.log(value))) <= rtol

    def to_dict(self) -> dict:
        v = self.value
        return {
            "mantissa": self.mantissa,
            "log_scale": self.log_scale,
            "log_value": None if self.is_zero else self.log(),
            "value": v if math.isfinite(v) else None,
        }


def power_log_scaled(a: Matrix, m: int) -> tuple[np.ndarray, float]:
    """Return ``(P, s)`` with ``A^m = P * exp(s)`` and ``max(P) = 1`` (or P = 0).

    Binary exponentiation; every intermediate is divided by its largest
    entry and the logarithm of the divisor is accumulated, so neither
    overflow nor underflow of the scale can occur.
    """
    if m < 1:
        raise ValueError(f"power must be >= 1, got {m}")
    base = a.array
    base_log = 0.0
    acc: np.ndarray | None = None
    acc_log = 0.0
    e = int(m)
    while True:
        peak = base.max()
        if peak == 0.0:
            return np.zeros_like(a.array), 0.0
        if peak != 1.0:
            base = base / peak
            base_log += math.log(peak)
        if e & 1:
            if acc is None:
                acc, acc_log = base, base_log
            else:
                acc = acc @ base
                acc_log += base_log
                peak = acc.max()
                if peak == 0.0:
                    return np.zeros_like(a.array), 0.0
                if peak != 1.0:
                    acc = acc / peak
                    acc_log += math.log(peak)
        e >>= 1
        if not e:
            break
        base = base @ base
        base_log *= 2.0
    return acc, acc_log


def trace_of_power(a: Matrix, m: int) -> LogScaledTrace:
    """``Tr(A^m)`` as a :class:`LogScaledTrace`.

    Examples
    --------
    >>> swap = Matrix.from_rows([[0, 1], [1, 0]])
    >>> trace_of_power(swap, 3).value, trace_of_power(swap, 4).value
    (0.0, 2.0)
    """
    p, s = power_log_scaled(a, m)
    t = float(np.trace(p))
    if t == 0.0:
        return LogScaledTrace(0.0, 0.0)
    return LogScaledTrace.normalize(t, s)


def spectral_radius_2x2(a: Matrix) -> float:
    """Closed-form spectral radius of a 2 x 2 matrix.

    Uses the characteristic polynomial ``x^2 - tr x + det``. The discriminant
    is evaluated as ``(a - d)^2 + 4bc`` which is non-negative for
    non-negative input, so both roots are real and the larger one is the
    Perron root.
    """
    if a.n != 2:
        raise DimensionMismatch(f"spectral_radius_2x2 needs n=2, got n={a.n}")
    (p, q), (r, s) = a.array
    tr = p + s
    disc = (p - s) ** 2 + 4.0 * q * r
    big = 0.5 * (tr + math.sqrt(disc))
    if big == 0.0:
        return 0.0
    small = (p * s - q * r) / big
    return float(max(abs(big), abs(small)))


def matrices_close(a: Matrix, b: Matrix, scale: float = 1e-12) -> bool:
    """Entrywise ``|a - b| <= scale * max(1, max entry)``."""
    if a.n != b.n:
        return False
    top = max(1.0, a.max_entry(), b.max_entry())
    return bool(np.all(np.abs(a.array - b.array) <= scale * top))


# -- file formats -----------------------------------------------------------

def parse_matrix_text(text: str) -> Matrix:
    """Parse the text format: ``n`` on line 1, then n rows of n numbers."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DimensionMismatch("empty matrix file")
    try:
        n = int(lines[0].strip())
    except ValueError as exc:
        raise MatrixError(f"first line must be the dimension, got {lines[0]!r}") from exc
    rows = lines[1:]
    if len(rows) != n:
        raise DimensionMismatch(f"expected {n} rows, got {len(rows)}")
    entries: list[float] = []
    for r, line in enumerate(rows):
        fields = line.split()
        if len(fields) != n:
            raise DimensionMismatch(f"row {r} has {len(fields)} entries, expected {n}")
        try:
            entries.extend(float(f) for f in fields)
        except ValueError as exc:
            raise MatrixError(f"row {r}: {exc}") from exc
    return new_checked(n, entries)


def format_matrix_text(a: Matrix) -> str:
    rows = [" ".join(repr(float(v)) for v in row) for row in a.array]
    return "\n".join([str(a.n), *rows]) + "\n"


def parse_matrix_json(text: str) -> Matrix:
    try:
        obj = json.loads(text)
        n, entries = obj["n"], obj["entries"]
    except (ValueError, KeyError, TypeError) as exc:
        raise MatrixError(f"malformed matrix JSON: {exc}") from exc
    if not isinstance(n, int) or isinstance(n, bool):
        raise DimensionMismatch(f"'n' must be an integer, got {n!r}")
    if not isinstance(entries, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in entries
    ):
        raise MatrixError("'entries' must be a list of numbers")
    return new_checked(n, entries)


def format_matrix_json(a: Matrix) -> str:
    return json.dumps({"n": a.n, "entries": list(a.entries)})


def read_matrix(path: PathLike) -> Matrix:
    """Read a matrix file; ``.json`` selects the JSON format, anything else text."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return parse_matrix_json(text)
    return parse_matrix_text(text)


def write_matrix(a: Matrix, path: PathLike) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(format_matrix_json(a) + "\n")
    else:
        path.write_text(format_matrix_text(a))

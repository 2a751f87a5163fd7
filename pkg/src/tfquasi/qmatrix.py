"""Quantization parameter matrices A acting on Z_N^d."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

__all__ = ["QuantMatrix", "as_quant"]


@dataclass(frozen=True)
class QuantMatrix:
    """An integer d x d matrix reduced mod N.

    Real scalars u/v are admitted through :meth:`scalar` when v is invertible
    mod N; the Weyl choice 1/2 therefore needs N odd.
    """

    entries: tuple[tuple[int, ...], ...]
    N: int

    def __post_init__(self):
        rows = tuple(tuple(int(c) % self.N for c in row) for row in self.entries)
        if not rows or any(len(r) != len(rows) for r in rows):
            raise ValueError("quantization matrix must be square")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def scalar(cls, u: int, v: int = 1, *, N: int, d: int = 1) -> "QuantMatrix":
        if gcd(v, N) != 1:
            raise ValueError(f"{u}/{v} is not defined mod {N}: gcd({v}, {N}) != 1")
        t = (u * pow(v, -1, N)) % N
        return cls(tuple(tuple(t if i == j else 0 for j in range(d)) for i in range(d)), N)

    @classmethod
    def parse(cls, text, *, N: int, d: int = 1) -> "QuantMatrix":
        """Read ``"0"``, ``"1/2"``, ``"3"`` or a JSON nested list of integers."""
        if isinstance(text, QuantMatrix):
            return text
        if isinstance(text, (list, tuple)):
            return cls(tuple(tuple(r) for r in text), N)
        s = str(text).strip()
        if s.startswith("["):
            return cls(tuple(tuple(r) for r in json.loads(s)), N)
        t = Fraction(s)
        return cls.scalar(t.numerator, t.denominator, N=N, d=d)

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)

    @property
    def T(self) -> "QuantMatrix":
        return QuantMatrix(tuple(zip(*self.entries)), self.N)

    def complement(self) -> "QuantMatrix":
        """I - A mod N."""
        eye = np.eye(self.d, dtype=np.int64)
        return QuantMatrix(tuple(map(tuple, eye - self.array)), self.N)

    def apply(self, y: np.ndarray) -> np.ndarray:
        """A y mod N for coordinates stacked along the first axis (shape (d, ...))."""
        return np.tensordot(self.array, y, axes=(1, 0)) % self.N

    def is_zero(self) -> bool:
        return not np.any(self.array)


def as_quant(A, N: int, d: int = 1) -> QuantMatrix:
    if isinstance(A, QuantMatrix):
        if A.N != N or A.d != d:
            raise ValueError(f"quantization matrix is over Z_{A.N}^{A.d}, grid is Z_{N}^{d}")
        return A
    return QuantMatrix.parse(A, N=N, d=d)

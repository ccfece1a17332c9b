"""Prime field arithmetic.

``FieldSpec`` fixes the modulus; ``FieldScalar`` is an immutable residue
bound to a spec.  The linear algebra layer works on plain ``int`` residues
for speed and only uses these types at its public edges.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_PRIME = 2**31


class FieldMismatchError(ValueError):
    """Raised when scalars from different fields are combined."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(p)."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not 2 <= self.p < MAX_PRIME:
            raise ValueError(f"modulus must be an integer in [2, 2^31), got {self.p!r}")
        if not is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")

    def __call__(self, value: int) -> FieldScalar:
        return FieldScalar(value % self.p, self)

    @property
    def zero(self) -> FieldScalar:
        return FieldScalar(0, self)

    @property
    def one(self) -> FieldScalar:
        return FieldScalar(1, self)

    def elements(self):
        return [FieldScalar(v, self) for v in range(self.p)]

    # raw residue helpers used by linalg
    def inv_int(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.p})")
        return pow(a, -1, self.p)


@dataclass(frozen=True)
class FieldScalar:
    value: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.value < self.spec.p:
            raise ValueError(f"residue {self.value} out of range for GF({self.spec.p})")

    def _coerce(self, other) -> int:
        if isinstance(other, FieldScalar):
            if other.spec != self.spec:
                raise FieldMismatchError(
                    f"cannot combine GF({self.spec.p}) with GF({other.spec.p})")
            return other.value
        if isinstance(other, int):
            return other % self.spec.p
        return NotImplemented

    def _make(self, v: int) -> FieldScalar:
        return FieldScalar(v % self.spec.p, self.spec)

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._make(self.value + b)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._make(self.value - b)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._make(b - self.value)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._make(self.value * b)

    __rmul__ = __mul__

    def __neg__(self):
        return self._make(-self.value)

    def inv(self) -> FieldScalar:
        return self._make(self.spec.inv_int(self.value))

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._make(self.value * self.spec.inv_int(b))

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self._make(b * self.spec.inv_int(self.value))

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        return self._make(pow(self.value, e, self.spec.p))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.spec.p})"


def add(a: FieldScalar, b: FieldScalar) -> FieldScalar:
    return a + b


def sub(a: FieldScalar, b: FieldScalar) -> FieldScalar:
    return a - b


def mul(a: FieldScalar, b: FieldScalar) -> FieldScalar:
    return a * b


def neg(a: FieldScalar) -> FieldScalar:
    return -a


def inv(a: FieldScalar) -> FieldScalar:
    return a.inv()

"""Exact dyadic rationals, piecewise-linear dyadic homeomorphisms of [0,1],
and the coordinatewise action on partition tuples.

Everything here is immutable and exact (arbitrary-precision integers), so
set cardinalities computed downstream are never polluted by rounding.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


@total_ordering
class Dyadic:
    """A rational of the form num / 2**exp, kept in canonical form.

    Canonical form: exp == 0, or num is odd; num == 0 forces exp == 0.
    """

    __slots__ = ("num", "exp")

    def __init__(self, num, exp=0):
        num = int(num)
        exp = int(exp)
        if exp < 0:
            num <<= -exp
            exp = 0
        if num == 0:
            exp = 0
        else:
            while exp > 0 and num % 2 == 0:
                num //= 2
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, *a):
        raise AttributeError("Dyadic is immutable")

    # -- conversions ------------------------------------------------------

    @classmethod
    def from_fraction(cls, f: Fraction) -> "Dyadic":
        den = f.denominator
        exp = den.bit_length() - 1
        if den != 1 << exp:
            raise ValueError(f"{f} is not dyadic")
        return cls(f.numerator, exp)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def __float__(self):
        return self.num / (1 << self.exp)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        e = max(self.exp, o.exp)
        return Dyadic((self.num << (e - self.exp)) + (o.num << (e - o.exp)), e)

    __radd__ = __add__

    def __neg__(self):
        return Dyadic(-self.num, self.exp)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Dyadic(self.num * o.num, self.exp + o.exp)

    __rmul__ = __mul__

    def half(self) -> "Dyadic":
        return Dyadic(self.num, self.exp + 1)

    # -- comparisons ------------------------------------------------------

    def _cmp_key(self, other):
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.num == o.num and self.exp == o.exp

    def __lt__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        a, b = self._cmp_key(o)
        return a < b

    def __hash__(self):
        return hash((self.num, self.exp))

    def __repr__(self):
        return f"Dyadic({self.num}, {self.exp})"

    def __str__(self):
        return f"{self.num}/2^{self.exp}"


ZERO = Dyadic(0)
ONE = Dyadic(1)


def midpoint(a: Dyadic, b: Dyadic) -> Dyadic:
    return (a + b).half()


class PLMap:
    """Piecewise-linear homeomorphism of [0,1] with dyadic breakpoints.

    Stored as the canonical breakpoint list ((0,0), ..., (1,1)) with
    collinear interior points removed.  Slopes of maps generated by the
    standard pair are always integer powers of 2, but the class itself only
    requires strict monotonicity.
    """

    __slots__ = ("breakpoints",)

    def __init__(self, breakpoints):
        pts = [(x if isinstance(x, Dyadic) else Dyadic(x),
                y if isinstance(y, Dyadic) else Dyadic(y))
               for x, y in breakpoints]
        if pts[0] != (ZERO, ZERO) or pts[-1] != (ONE, ONE):
            raise ValueError("breakpoints must run from (0,0) to (1,1)")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not (x0 < x1 and y0 < y1):
                raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", tuple(_canonicalize(pts)))

    def __setattr__(self, *a):
        raise AttributeError("PLMap is immutable")

    def __call__(self, x: Dyadic) -> Dyadic:
        """Exact image of a dyadic point in [0,1]."""
        if not (ZERO <= x <= ONE):
            raise ValueError("argument outside [0,1]")
        pts = self.breakpoints
        lo, hi = 0, len(pts) - 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if pts[mid][0] <= x:
                lo = mid
            else:
                hi = mid
        x0, y0 = pts[lo]
        x1, y1 = pts[hi]
        if x == x0:
            return y0
        dx = x1 - x0
        dy = y1 - y0
        # fast path: power-of-two slope needs only integer shifts
        if dx.num == 1 and dy.num == 1:
            # slope = 2^(dx.exp - dy.exp)
            return y0 + Dyadic((x - x0).num, (x - x0).exp + dy.exp - dx.exp)
        slope = dy.as_fraction() / dx.as_fraction()
        return Dyadic.from_fraction(y0.as_fraction() + slope * (x.as_fraction() - x0.as_fraction()))

    def slopes(self):
        out = []
        for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:]):
            out.append((y1.as_fraction() - y0.as_fraction()) / (x1.as_fraction() - x0.as_fraction()))
        return out

    def inverse(self) -> "PLMap":
        return PLMap([(y, x) for x, y in self.breakpoints])

    def compose(self, other: "PLMap") -> "PLMap":
        """self after other (function composition self o other)."""
        xs = {x for x, _ in other.breakpoints}
        inv = other.inverse()
        for x, _ in self.breakpoints:
            xs.add(inv(x))
        xs = sorted(xs)
        return PLMap([(x, self(other(x))) for x in xs])

    def __mul__(self, other):
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.compose(other)

    def __eq__(self, other):
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.breakpoints == other.breakpoints

    def __hash__(self):
        return hash(self.breakpoints)

    def is_identity(self) -> bool:
        return len(self.breakpoints) == 2

    def interior_breakpoints(self):
        return [x for x, _ in self.breakpoints[1:-1]]

    def __repr__(self):
        pts = ", ".join(f"({x},{y})" for x, y in self.breakpoints)
        return f"PLMap([{pts}])"


def _canonicalize(pts):
    out = [pts[0]]
    for i in range(1, len(pts) - 1):
        x0, y0 = out[-1]
        x1, y1 = pts[i]
        x2, y2 = pts[i + 1]
        lhs = (y1.as_fraction() - y0.as_fraction()) * (x2.as_fraction() - x1.as_fraction())
        rhs = (y2.as_fraction() - y1.as_fraction()) * (x1.as_fraction() - x0.as_fraction())
        if lhs != rhs:
            out.append(pts[i])
    out.append(pts[-1])
    return out


IDENTITY = PLMap([(ZERO, ZERO), (ONE, ONE)])

# the standard generating pair of the dyadic PL group
F1 = PLMap([
    (Dyadic(0), Dyadic(0)),
    (Dyadic(1, 1), Dyadic(1, 2)),
    (Dyadic(3, 2), Dyadic(1, 1)),
    (Dyadic(1), Dyadic(1)),
])
F2 = PLMap([
    (Dyadic(0), Dyadic(0)),
    (Dyadic(1, 1), Dyadic(1, 1)),
    (Dyadic(3, 2), Dyadic(5, 3)),
    (Dyadic(7, 3), Dyadic(3, 2)),
    (Dyadic(1), Dyadic(1)),
])

GENERATORS = {"f1": F1, "f2": F2}


def standard_point(n: int) -> Dyadic:
    """r_n = 1 - 1/2^(n+1) for n >= 0, and 1/2^(-n) for n < 0."""
    if n >= 0:
        return Dyadic((1 << (n + 1)) - 1, n + 1)
    return Dyadic(1, -n)


class Tuple_:
    """Strictly increasing tuple of dyadics in (0,1): a point of the open
    partition simplex.  Endpoints 0 and 1 are implicit."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(c if isinstance(c, Dyadic) else Dyadic(c) for c in coords)
        prev = ZERO
        for c in coords:
            if not (prev < c < ONE):
                raise ValueError("coordinates must be strictly increasing in (0,1)")
            prev = c
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, *a):
        raise AttributeError("Tuple_ is immutable")

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __eq__(self, other):
        if not isinstance(other, Tuple_):
            return NotImplemented
        return self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return f"Tuple_({[str(c) for c in self.coords]})"

    def render(self) -> str:
        return "[" + ",".join(str(c) for c in self.coords) + "]"

    def mesh(self) -> Dyadic:
        """Maximum gap, endpoints 0 and 1 included."""
        pts = (ZERO,) + self.coords + (ONE,)
        best = pts[1] - pts[0]
        for a, b in zip(pts[1:], pts[2:]):
            gap = b - a
            if best < gap:
                best = gap
        return best

    def apply(self, f: PLMap) -> "Tuple_":
        return Tuple_([f(c) for c in self.coords])

    def floats(self):
        return [float(c) for c in self.coords]


class Word:
    """A word in the generating pair, as (generator-id, exponent) letters.

    Adjacent letters carry distinct generator ids and nonzero exponents.
    Application is rightmost-letter-first (function composition order);
    pass leftmost_first=True to flip the convention.
    """

    __slots__ = ("letters",)

    def __init__(self, letters):
        norm = []
        for gen, e in letters:
            if gen not in ("f1", "f2"):
                raise ValueError(f"unknown generator {gen!r}")
            e = int(e)
            if e == 0:
                continue
            if norm and norm[-1][0] == gen:
                e2 = norm[-1][1] + e
                norm.pop()
                if e2 != 0:
                    norm.append((gen, e2))
            else:
                norm.append((gen, e))
        object.__setattr__(self, "letters", tuple(norm))

    def __setattr__(self, *a):
        raise AttributeError("Word is immutable")

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.letters == other.letters

    def __hash__(self):
        return hash(self.letters)

    def __repr__(self):
        return f"Word({list(self.letters)})"

    def __mul__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word([(g, -e) for g, e in reversed(self.letters)])

    def to_map(self) -> PLMap:
        m = IDENTITY
        for gen, e in self.letters:
            base = GENERATORS[gen]
            step = base if e > 0 else base.inverse()
            for _ in range(abs(e)):
                m = m * step
        return m

    def apply(self, xs: Tuple_, leftmost_first: bool = False) -> Tuple_:
        letters = self.letters if not leftmost_first else tuple(reversed(self.letters))
        seq = reversed(letters)  # rightmost letter acts first
        out = list(xs.coords)
        for gen, e in seq:
            base = GENERATORS[gen]
            step = base if e > 0 else base.inverse()
            for _ in range(abs(e)):
                out = [step(c) for c in out]
        return Tuple_(out)


EMPTY_WORD = Word([])

"""
Exact Scalar Arithmetic

Every coefficient the deformation machinery produces lives in the tower

    Q  <  Q(v)  <  Q(v)[eps]

where v is a formal transcendental (read it as e^{1/d} for the common
denominator d of a Poisson matrix) and eps is the deformation parameter.

- Rational:    fractions.Fraction
- LaurentPoly: v^shift * p(v) with p a polynomial over QQ, p(0) != 0
- RatFunc:     LaurentPoly / polynomial, always kept in canonical form
- EpsPoly:     polynomial in eps whose coefficients are RatFunc values

Canonical form of a RatFunc: the denominator is a monic polynomial with
nonzero constant term, coprime to the numerator. Structural equality of
two RatFunc values is then equality of rational functions.

Example:
    >>> f = parse_ratfunc("(v^2-1)/(v-1)")
    >>> str(f)
    'v+1'
    >>> evaluate(parse_ratfunc("v^24/(v^30-1)"), 2)
    Fraction(16777216, 1073741823)
"""

from fractions import Fraction
from typing import Dict, Iterator, Optional, Sequence, Tuple

import sympy
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

Rational = Fraction

_RING, _V = ring("v", QQ)
_V_SYMBOL = sympy.Symbol("v")


class MalformedInputError(ValueError):
    """Raised for text or data that does not describe a valid scalar."""


class PoleError(ValueError):
    """Raised when a rational function is evaluated at one of its poles."""


def as_rational(value) -> Fraction:
    """
    Convert an exact scalar (int, Fraction, decimal string or QQ element)
    into a Fraction.

    Raises:
        TypeError: If the value is a float or not a rational number.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except ValueError as exc:
            raise MalformedInputError(f"not a rational number: {value!r}") from exc
    if isinstance(value, float):
        raise TypeError("floating point values are not exact scalars")
    try:
        return Fraction(int(value.numerator), int(value.denominator))
    except (AttributeError, TypeError):
        pass
    try:
        # sympy Rational
        return Fraction(int(value.p), int(value.q))
    except AttributeError as exc:
        raise TypeError(f"cannot convert {value!r} to a rational") from exc


def _qq(value) -> object:
    fraction = as_rational(value)
    return QQ(fraction.numerator, fraction.denominator)


def _strip(poly) -> Tuple[int, object]:
    """Split a polynomial as v^low * rest with rest(0) != 0."""
    if not poly:
        return 0, _RING.zero
    low = min(monom[0] for monom in poly.keys())
    if low == 0:
        return 0, poly
    return low, _RING.from_dict({(monom[0] - low,): c for monom, c in poly.items()})


def _format_terms(terms: Dict[int, Fraction]) -> str:
    """Render {exponent: coefficient} in descending powers of v."""
    if not terms:
        return "0"
    pieces = []
    for exponent in sorted(terms, reverse=True):
        coeff = terms[exponent]
        if exponent == 0:
            body = str(coeff)
        else:
            power = "v" if exponent == 1 else f"v^{exponent}"
            if coeff == 1:
                body = power
            elif coeff == -1:
                body = "-" + power
            else:
                body = f"{coeff}*{power}"
        if pieces and not body.startswith("-"):
            body = "+" + body
        pieces.append(body)
    return "".join(pieces)


class LaurentPoly:
    """
    A Laurent polynomial in v with rational coefficients.

    Stored as v^shift * poly where poly has a nonzero constant term (or is
    zero, in which case shift is 0).
    """

    __slots__ = ("_shift", "_poly")

    def __init__(self, coefficients: Optional[Dict[int, object]] = None):
        terms = {e: as_rational(c) for e, c in (coefficients or {}).items()}
        terms = {e: c for e, c in terms.items() if c != 0}
        if not terms:
            self._shift, self._poly = 0, _RING.zero
            return
        low = min(terms)
        self._shift = low
        self._poly = _RING.from_dict({(e - low,): _qq(c) for e, c in terms.items()})

    @classmethod
    def _from_parts(cls, shift: int, poly) -> "LaurentPoly":
        obj = cls.__new__(cls)
        low, rest = _strip(poly)
        obj._shift = shift + low if rest else 0
        obj._poly = rest
        return obj

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "LaurentPoly":
        return cls({exponent: coeff})

    @classmethod
    def coerce(cls, value) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        return cls({0: value})

    def is_zero(self) -> bool:
        return not self._poly

    def valuation(self) -> int:
        """Lowest exponent present (0 for the zero polynomial)."""
        return self._shift

    def degree(self) -> int:
        """Highest exponent present (0 for the zero polynomial)."""
        if not self._poly:
            return 0
        return self._shift + self._poly.degree()

    def terms(self) -> Dict[int, Fraction]:
        return {
            self._shift + monom[0]: as_rational(c) for monom, c in self._poly.items()
        }

    def _aligned(self, other: "LaurentPoly") -> Tuple[int, object, object]:
        low = min(self._shift, other._shift)
        return (
            low,
            self._poly * _V ** (self._shift - low),
            other._poly * _V ** (other._shift - low),
        )

    def __add__(self, other) -> "LaurentPoly":
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        low, left, right = self._aligned(other)
        return LaurentPoly._from_parts(low, left + right)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly._from_parts(self._shift, -self._poly)

    def __sub__(self, other) -> "LaurentPoly":
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "LaurentPoly":
        return LaurentPoly.coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return LaurentPoly._from_parts(self._shift + other._shift, self._poly * other._poly)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "LaurentPoly":
        if exponent >= 0:
            return LaurentPoly._from_parts(self._shift * exponent, self._poly ** exponent)
        if len(self._poly) != 1:
            raise ValueError("only monomials have Laurent polynomial inverses")
        (_, coeff), = self.terms().items()
        return LaurentPoly.monomial(self._shift * exponent, coeff ** exponent)

    def __eq__(self, other) -> bool:
        try:
            other = LaurentPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self._shift == other._shift and self._poly == other._poly

    def __hash__(self) -> int:
        return hash((self._shift, frozenset(self._poly.items())))

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    def __str__(self) -> str:
        return _format_terms(self.terms())


class RatFunc:
    """
    A rational function in v over QQ in canonical form.

    The value is v^shift * num(v) / den(v), where num(0) != 0, den(0) != 0,
    den is monic and gcd(num, den) = 1. Zero is stored as num = 0, den = 1.
    """

    __slots__ = ("_shift", "_num", "_den")

    def __init__(self, numerator=0, denominator=1):
        result = canonicalize(LaurentPoly.coerce(numerator), LaurentPoly.coerce(denominator))
        self._shift, self._num, self._den = result._shift, result._num, result._den

    @classmethod
    def _raw(cls, shift: int, num, den) -> "RatFunc":
        obj = cls.__new__(cls)
        obj._shift, obj._num, obj._den = shift, num, den
        return obj

    @classmethod
    def _build(cls, shift: int, num, den) -> "RatFunc":
        # num and den are plain polynomials; bring them to canonical form
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        num_low, num = _strip(num)
        den_low, den = _strip(den)
        if not num:
            return cls._raw(0, _RING.zero, _RING.one)
        shift += num_low - den_low
        if den.degree() > 0:
            _, num, den = num.cofactors(den)
        lead = den.LC
        if lead != 1:
            num = num.quo_ground(lead)
            den = den.monic()
        return cls._raw(shift, num, den)

    @classmethod
    def coerce(cls, value) -> "RatFunc":
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, LaurentPoly):
            return cls._build(value._shift, value._poly, _RING.one)
        fraction = as_rational(value)
        if fraction == 0:
            return cls.zero()
        return cls._raw(0, _RING(_qq(fraction)), _RING.one)

    @classmethod
    def zero(cls) -> "RatFunc":
        return cls._raw(0, _RING.zero, _RING.one)

    @classmethod
    def one(cls) -> "RatFunc":
        return cls._raw(0, _RING.one, _RING.one)

    @classmethod
    def monomial(cls, exponent: int, coeff=1) -> "RatFunc":
        """The rational function coeff * v^exponent."""
        if as_rational(coeff) == 0:
            return cls.zero()
        return cls._raw(exponent, _RING(_qq(coeff)), _RING.one)

    @property
    def numerator(self) -> LaurentPoly:
        return LaurentPoly._from_parts(self._shift, self._num)

    @property
    def denominator(self) -> LaurentPoly:
        return LaurentPoly._from_parts(0, self._den)

    def is_zero(self) -> bool:
        return not self._num

    def is_polynomial(self) -> bool:
        return self._den == _RING.one

    def is_constant(self) -> bool:
        return self.is_zero() or (
            self._shift == 0 and self.is_polynomial() and self._num.degree() == 0
        )

    def constant_value(self) -> Fraction:
        """Return the value of a constant rational function."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return evaluate(self, 1)

    def _is_plain_monomial(self) -> bool:
        return self.is_polynomial() and len(self._num) == 1

    def __add__(self, other) -> "RatFunc":
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        low = min(self._shift, other._shift)
        left = self._num * _V ** (self._shift - low)
        right = other._num * _V ** (other._shift - low)
        if self._den == other._den:
            return RatFunc._build(low, left + right, self._den)
        common, left_cof, right_cof = self._den.cofactors(other._den)
        # den1 * den2 / common is the lcm
        numerator = left * right_cof + right * left_cof
        return RatFunc._build(low, numerator, left_cof * other._den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        return RatFunc._raw(self._shift, -self._num, self._den)

    def __sub__(self, other) -> "RatFunc":
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "RatFunc":
        return RatFunc.coerce(other) - self

    def __mul__(self, other) -> "RatFunc":
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RatFunc.zero()
        shift = self._shift + other._shift
        if self._is_plain_monomial():
            return RatFunc._raw(shift, other._num * self._num.LC, other._den)
        if other._is_plain_monomial():
            return RatFunc._raw(shift, self._num * other._num.LC, self._den)
        return RatFunc._build(shift, self._num * other._num, self._den * other._den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RatFunc._build(-self._shift, self._den, self._num)

    def __truediv__(self, other) -> "RatFunc":
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "RatFunc":
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "RatFunc":
        if exponent < 0:
            return self.inverse() ** (-exponent)
        if self.is_zero():
            return RatFunc.one() if exponent == 0 else RatFunc.zero()
        return RatFunc._raw(self._shift * exponent, self._num ** exponent, self._den ** exponent)

    def __eq__(self, other) -> bool:
        try:
            other = RatFunc.coerce(other)
        except TypeError:
            return NotImplemented
        return (
            self._shift == other._shift
            and self._num == other._num
            and self._den == other._den
        )

    def __hash__(self) -> int:
        return hash(
            (self._shift, frozenset(self._num.items()), frozenset(self._den.items()))
        )

    def __repr__(self) -> str:
        return f"RatFunc({self})"

    def __str__(self) -> str:
        numerator = self.numerator.terms()
        top = _format_terms(numerator)
        if self.is_polynomial():
            return top
        if len(numerator) > 1:
            top = f"({top})"
        return f"{top}/({_format_terms(self.denominator.terms())})"


def canonicalize(numerator: LaurentPoly, denominator: LaurentPoly) -> RatFunc:
    """
    Build the canonical representative of numerator/denominator.

    Args:
        numerator (LaurentPoly): Numerator.
        denominator (LaurentPoly): Denominator, must be nonzero.

    Returns:
        RatFunc: Reduced fraction with monic denominator, lowest exponent 0.

    Raises:
        MalformedInputError: If the denominator is zero.
    """
    if denominator.is_zero():
        raise MalformedInputError("zero denominator")
    return RatFunc._build(numerator._shift - denominator._shift, numerator._poly, denominator._poly)


def evaluate(f: RatFunc, v0) -> Fraction:
    """
    Substitute the rational number v0 for v.

    Raises:
        PoleError: If v0 is a pole of f (including v0 = 0 with negative
            powers of v in f).
    """
    f = RatFunc.coerce(f)
    v0 = as_rational(v0)
    if f.is_zero():
        return Fraction(0)
    if v0 == 0 and f._shift < 0:
        raise PoleError(f"{f} has a pole at v = 0")
    den = sum((as_rational(c) * v0 ** m[0] for m, c in f._den.items()), Fraction(0))
    if den == 0:
        raise PoleError(f"{f} has a pole at v = {v0}")
    num = sum((as_rational(c) * v0 ** m[0] for m, c in f._num.items()), Fraction(0))
    return v0 ** f._shift * num / den


def parse_ratfunc(text: str) -> RatFunc:
    """
    Parse the `p(v)/q(v)` grammar with `^` for powers.

    Example:
        >>> str(parse_ratfunc("v^2*(1+v^10)/((1-v^5)*(1-v^30))"))
        '(v^12+v^2)/(v^35-v^30-v^5+1)'
    """
    try:
        expr = sympy.sympify(text.replace("^", "**"), locals={"v": _V_SYMBOL})
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise MalformedInputError(f"cannot parse {text!r}") from exc
    if expr.free_symbols - {_V_SYMBOL}:
        raise MalformedInputError(f"unexpected symbols in {text!r}")
    numerator, denominator = sympy.fraction(sympy.together(expr))
    return canonicalize(_laurent_from_sympy(numerator), _laurent_from_sympy(denominator))


def _laurent_from_sympy(expr) -> LaurentPoly:
    try:
        poly = sympy.Poly(sympy.expand(expr), _V_SYMBOL, domain=QQ)
    except sympy.PolynomialError as exc:
        raise MalformedInputError(f"not a polynomial in v: {expr}") from exc
    return LaurentPoly(
        {monom[0]: as_rational(sympy.Rational(c)) for monom, c in poly.terms()}
    )


class EpsPoly:
    """
    A polynomial in eps with RatFunc coefficients.

    Coefficients are stored by eps-degree with no trailing zeros, so the
    zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coefficients: Sequence = ()):
        coeffs = [RatFunc.coerce(c) for c in coefficients]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self._coeffs = tuple(coeffs)

    @classmethod
    def term(cls, coeff, power: int = 0) -> "EpsPoly":
        """The single term coeff * eps^power."""
        return cls([0] * power + [coeff])

    @classmethod
    def coerce(cls, value) -> "EpsPoly":
        if isinstance(value, EpsPoly):
            return value
        return cls([value])

    @property
    def coefficients(self) -> Tuple[RatFunc, ...]:
        return self._coeffs

    def degree(self) -> int:
        """eps-degree, -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def coefficient(self, power: int) -> RatFunc:
        if 0 <= power < len(self._coeffs):
            return self._coeffs[power]
        return RatFunc.zero()

    def items(self) -> Iterator[Tuple[int, RatFunc]]:
        for power, coeff in enumerate(self._coeffs):
            if not coeff.is_zero():
                yield power, coeff

    def truncate(self, cap: Optional[int]) -> "EpsPoly":
        """Drop every term of eps-degree above cap."""
        if cap is None or cap >= self.degree():
            return self
        return EpsPoly(self._coeffs[: cap + 1])

    def __add__(self, other) -> "EpsPoly":
        try:
            other = EpsPoly.coerce(other)
        except TypeError:
            return NotImplemented
        size = max(len(self._coeffs), len(other._coeffs))
        return EpsPoly(self.coefficient(p) + other.coefficient(p) for p in range(size))

    __radd__ = __add__

    def __neg__(self) -> "EpsPoly":
        return EpsPoly(-c for c in self._coeffs)

    def __sub__(self, other) -> "EpsPoly":
        try:
            other = EpsPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "EpsPoly":
        return EpsPoly.coerce(other) - self

    def multiply(self, other, cap: Optional[int] = None) -> "EpsPoly":
        """Product, keeping only eps-degrees up to cap when cap is given."""
        other = EpsPoly.coerce(other)
        if self.is_zero() or other.is_zero():
            return EpsPoly()
        size = len(self._coeffs) + len(other._coeffs) - 1
        if cap is not None:
            size = min(size, cap + 1)
        result = [RatFunc.zero()] * size
        for p, left in enumerate(self._coeffs[:size]):
            if left.is_zero():
                continue
            for q, right in enumerate(other._coeffs[: size - p]):
                if not right.is_zero():
                    result[p + q] = result[p + q] + left * right
        return EpsPoly(result)

    def __mul__(self, other) -> "EpsPoly":
        try:
            return self.multiply(other)
        except TypeError:
            return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "EpsPoly":
        if exponent < 0:
            raise ValueError("negative powers of an eps-polynomial are not polynomials")
        result = EpsPoly([1])
        for _ in range(exponent):
            result = result * self
        return result

    def evaluate(self, eps0) -> RatFunc:
        """Substitute eps0 (rational or RatFunc) for eps."""
        eps0 = RatFunc.coerce(eps0)
        total = RatFunc.zero()
        for coeff in reversed(self._coeffs):
            total = total * eps0 + coeff
        return total

    def map_coefficients(self, func) -> "EpsPoly":
        return EpsPoly(func(c) for c in self._coeffs)

    def __eq__(self, other) -> bool:
        try:
            other = EpsPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def __repr__(self) -> str:
        return f"EpsPoly({self})"

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        pieces = []
        for power, coeff in self.items():
            text = str(coeff)
            if power == 0:
                pieces.append(text)
                continue
            eps = "eps" if power == 1 else f"eps^{power}"
            pieces.append(eps if coeff == 1 else f"({text})*{eps}")
        return " + ".join(pieces)


if __name__ == "__main__":
    try:
        c40 = parse_ratfunc("v^24/(v^30-1)")
        c41 = parse_ratfunc("v^-10/(1-v^5)")
        print(f"C_40^11 = {c40}")
        print(f"C_41^03 = {c41}")
        print(f"sum     = {c40 + c41}")
        print(f"C_40^11 at v = 2: {evaluate(c40, 2)}")
        series = EpsPoly([RatFunc.monomial(-9), RatFunc.monomial(-3), c40])
        print(f"eps-polynomial: {series}")
    except ValueError as e:
        print(f"Error: {e}")

"""Perturbation expansions for simple roots of eps-perturbed polynomials.

A :class:`PerturbedPolynomial` stores ``P(x, eps) = sum_j c_j(eps) x**j`` where
every ``c_j`` is a finite sum of rational multiples of rational powers of eps.
Rational exponents are needed once a singular problem is rescaled with
``x = eps**-p * y`` for fractional ``p``.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import ConvergenceFailure, NoRoots, SingularHierarchy
from .series_core import AsymptoticSeries, GaugeSequence

SIMPLE_ROOT_TOL = 1e-10
MAX_BALANCE_DENOMINATOR = 4


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v).limit_denominator(10**12)
    return Fraction(v)


def _exact_pow(base: Fraction, e: Fraction):
    """``base**e`` as a Fraction when the root is exact, otherwise a float."""
    if e.denominator == 1:
        return base ** e.numerator
    if base > 0:
        num = _int_root(base.numerator, e.denominator)
        den = _int_root(base.denominator, e.denominator)
        if num is not None and den is not None:
            return Fraction(num, den) ** e.numerator
    return float(base) ** float(e)


def _int_root(n: int, k: int):
    r = round(n ** (1.0 / k))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**k == n:
            return cand
    return None


class Radical:
    """Exact element ``sum_i c_i * root**i`` of Q(root), where ``root**d = r``.

    ``root`` is the positive real d-th root of the positive rational ``r``.
    Results with no irrational part collapse to plain Fractions, so hierarchy
    coefficients such as the quintic's ``a_1 = -1/8`` come out exactly.
    """

    __slots__ = ("c", "r", "d")

    def __init__(self, c, r: Fraction, d: int):
        self.c = tuple(Fraction(v) for v in c)
        self.r = Fraction(r)
        self.d = d

    @classmethod
    def root(cls, r, d: int) -> "Radical":
        c = [Fraction(0)] * d
        c[1] = Fraction(1)
        return cls(c, r, d)

    def _lift(self, other):
        if isinstance(other, Radical):
            if (other.r, other.d) != (self.r, self.d):
                raise ValueError("mixing different radical fields")
            return other
        if isinstance(other, (int, Fraction)):
            return Radical([other] + [0] * (self.d - 1), self.r, self.d)
        return None

    @staticmethod
    def _wrap(c, r, d):
        if all(v == 0 for v in c[1:]):
            return c[0]
        return Radical(c, r, d)

    def __float__(self):
        a = float(self.r) ** (1.0 / self.d)
        return float(sum(float(v) * a**i for i, v in enumerate(self.c)))

    def __complex__(self):
        return complex(float(self))

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return float(self) + other
        return self._wrap([a + b for a, b in zip(self.c, o.c)], self.r, self.d)

    __radd__ = __add__

    def __neg__(self):
        return Radical([-v for v in self.c], self.r, self.d)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return float(self) * other
        d = self.d
        out = [Fraction(0)] * d
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(o.c):
                k = i + j
                if k >= d:
                    out[k - d] += a * b * self.r
                else:
                    out[k] += a * b
        return self._wrap(out, self.r, d)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return float(self) ** n
        out = Fraction(1)
        for _ in range(n):
            out = self * out
        return out

    def _inverse(self):
        # Solve (self * z) = 1 as a d x d rational linear system.
        d = self.d
        cols = []
        for j in range(d):
            e = [Fraction(0)] * d
            e[j] = Fraction(1)
            prod = self * Radical(e, self.r, d)
            prod = self._lift(prod)
            cols.append(list(prod.c))
        m = [[cols[j][i] for j in range(d)] + [Fraction(int(i == 0))] for i in range(d)]
        for col in range(d):
            piv = next(i for i in range(col, d) if m[i][col] != 0)
            m[col], m[piv] = m[piv], m[col]
            pv = m[col][col]
            m[col] = [v / pv for v in m[col]]
            for i in range(d):
                if i != col and m[i][col] != 0:
                    f = m[i][col]
                    m[i] = [a - f * b for a, b in zip(m[i], m[col])]
        return Radical([m[i][d] for i in range(d)], self.r, d)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return float(self) / other
        if isinstance(other, (int, Fraction)):
            return self._wrap([v / Fraction(other) for v in self.c], self.r, self.d)
        return self * o._inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return other / float(self)
        return o * self._inverse()

    def __abs__(self):
        return abs(float(self))

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return float(self) == other
        return self.c == o.c

    def __hash__(self):
        return hash((self.c, self.r, self.d))

    def __lt__(self, other):
        return float(self) < float(other)

    def __repr__(self):
        terms = [f"{v}*{self.r}^({i}/{self.d})" for i, v in enumerate(self.c) if v != 0]
        return "Radical(" + " + ".join(terms or ["0"]) + ")"


numbers.Real.register(Radical)


@dataclass(frozen=True)
class PerturbedPolynomial:
    """``P(x, eps) = sum_j c_j(eps) x**j``.

    ``terms`` maps the x-degree ``j`` to the eps-coefficient ``c_j``, itself a
    mapping ``{eps_exponent: rational coefficient}``.
    """

    terms: tuple  # ((j, ((exponent, coeff), ...)), ...) sorted, zero-free

    def __post_init__(self):
        if not any(j >= 1 for j, _ in self.terms):
            raise ValueError("polynomial must contain a term of positive x-degree")

    @classmethod
    def from_dict(cls, terms: Mapping[int, Mapping]) -> "PerturbedPolynomial":
        norm = []
        for j, coeff in terms.items():
            if j < 0:
                raise ValueError("x-degrees must be nonnegative")
            items = {}
            for e, c in coeff.items():
                c = _frac(c)
                e = _frac(e)
                if c != 0:
                    items[e] = items.get(e, Fraction(0)) + c
            items = tuple(sorted((e, c) for e, c in items.items() if c != 0))
            if items:
                norm.append((int(j), items))
        return cls(tuple(sorted(norm)))

    @classmethod
    def from_pairs(cls, pairs: Iterable) -> "PerturbedPolynomial":
        """Build from ``(j, eps_exponent, coeff)`` triples; repeats accumulate."""
        acc: dict = {}
        for j, e, c in pairs:
            acc.setdefault(j, {})
            acc[j][_frac(e)] = acc[j].get(_frac(e), Fraction(0)) + _frac(c)
        return cls.from_dict(acc)

    def as_dict(self) -> dict:
        return {j: dict(c) for j, c in self.terms}

    @property
    def degree(self) -> int:
        return max(j for j, _ in self.terms)

    @property
    def integer_powers(self) -> bool:
        return all(e.denominator == 1 for _, c in self.terms for e, _ in c)

    def coeff_at(self, j: int, eps):
        for jj, c in self.terms:
            if jj == j:
                return sum(a * _eps_pow(eps, e) for e, a in c)
        return 0

    def unperturbed_coeffs(self) -> dict[int, Fraction]:
        """Coefficients of ``P(x, 0)`` (terms with eps exponent 0)."""
        out = {}
        for j, c in self.terms:
            if any(e < 0 for e, _ in c):
                raise ValueError("P(x, 0) is undefined: negative eps power present")
            v = sum((a for e, a in c if e == 0), Fraction(0))
            if v != 0:
                out[j] = v
        return out

    def __call__(self, x, eps):
        total = 0
        for j, c in self.terms:
            cj = sum(a * _eps_pow(eps, e) for e, a in c)
            total = total + cj * x**j
        return total

    def dx(self, x, eps):
        total = 0
        for j, c in self.terms:
            if j == 0:
                continue
            cj = sum(a * _eps_pow(eps, e) for e, a in c)
            total = total + j * cj * x ** (j - 1)
        return total

    def scale(self, x, eps) -> float:
        """Sum of term magnitudes, used to make residual tolerances relative."""
        return float(sum(abs(float(self.coeff_at(j, eps)) * float(x) ** j) for j, _ in self.terms))

    def __str__(self) -> str:
        parts = []
        for j, c in reversed(self.terms):
            coeff = " + ".join(f"{a}*eps^{e}" if e != 0 else f"{a}" for e, a in c)
            parts.append(f"({coeff})*x^{j}" if j else f"({coeff})")
        return " + ".join(parts)


def _eps_pow(eps, e: Fraction):
    if e == 0:
        return 1
    if isinstance(eps, (Fraction, int)):
        return _exact_pow(Fraction(eps), e)
    if e.denominator == 1:
        return eps ** e.numerator
    return float(eps) ** float(e)


@dataclass(frozen=True)
class RootExpansion:
    """Expansion ``x(eps) = sum_n a_n eps**n`` of a simple root."""

    base_root: object
    coeffs: AsymptoticSeries
    linear_operator_value: object
    # right-hand sides r_p of the order-p equations L a_p = r_p, p >= 1
    hierarchy_rhs: tuple = ()

    def __post_init__(self):
        if abs(float(self.linear_operator_value)) <= SIMPLE_ROOT_TOL:
            raise SingularHierarchy("linear operator of the hierarchy vanishes")

    def __call__(self, eps, order: int | None = None):
        return self.coeffs.partial_sum(eps, order)


def _canonical_root(P: PerturbedPolynomial, a0):
    """Replace a float root by an exact rational or real radical ``(+-) r**(1/d)``
    when one satisfies ``P(., 0) = 0`` exactly; otherwise keep the float."""
    if isinstance(a0, (Fraction, int, Radical)):
        return a0
    a0 = float(a0)
    cand = Fraction(a0).limit_denominator(1000)
    if abs(float(cand) - a0) < 1e-9 and P(cand, 0) == 0:
        return cand
    if a0 != 0:
        for d in (2, 3, 4, 5, 6):
            r = Fraction(abs(a0) ** d).limit_denominator(1000)
            if r <= 0 or abs(float(r) ** (1.0 / d) - abs(a0)) > 1e-9 * abs(a0):
                continue
            root = Radical.root(r, d)
            if a0 < 0:
                root = -root
            if P(root, 0) == 0:
                return root
    return a0


def solve_unperturbed(P: PerturbedPolynomial) -> list[float]:
    """All real roots of ``P(x, 0)``, ascending and deduplicated."""
    coeffs = P.unperturbed_coeffs()
    if not coeffs:
        raise ValueError("P(x, 0) vanishes identically")
    deg = max(coeffs)
    if deg == 0:
        raise NoRoots("P(x, 0) is a nonzero constant")
    dense = [float(coeffs.get(j, 0)) for j in range(deg, -1, -1)]
    raw = np.roots(dense)
    p0 = np.poly1d(dense)
    dp0 = p0.deriv()
    roots: list[float] = []
    scale = max(1.0, float(np.max(np.abs(raw)))) if raw.size else 1.0
    for r in raw:
        if abs(r.imag) > 1e-7 * scale:
            continue
        x = float(r.real)
        for _ in range(50):
            d = dp0(x)
            if d == 0:
                break
            step = p0(x) / d
            x -= step
            if abs(step) <= 1e-16 * max(1.0, abs(x)):
                break
        if not any(abs(x - y) <= 1e-9 * max(1.0, abs(x)) for y in roots):
            roots.append(x)
    return sorted(roots)


def _series_mul(a: list, b: list, order: int) -> list:
    out = [0] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0:
            continue
        for j in range(order + 1 - i):
            out[i + j] = out[i + j] + ai * b[j]
    return out


def _substituted_coeffs(P: PerturbedPolynomial, x_series: list, order: int) -> list:
    """eps-expansion coefficients of ``P(sum x_n eps**n, eps)`` up to ``order``."""
    total = [0] * (order + 1)
    power = [1] + [0] * order  # x**0
    max_deg = P.degree
    powers = [power]
    for _ in range(max_deg):
        power = _series_mul(power, x_series, order)
        powers.append(power)
    for j, c in P.terms:
        for e, a in c:
            shift = int(e)
            for n in range(order + 1 - shift):
                total[n + shift] = total[n + shift] + a * powers[j][n]
    return total


def expand_root(P: PerturbedPolynomial, a0, N: int) -> RootExpansion:
    """Solve the perturbation hierarchy for the root continuing from ``a0``.

    Each order ``p >= 1`` is the linear equation ``L a_p = r_p`` with
    ``L = dP/dx(a0, 0)``; ``r_p`` collects the eps**p coefficient of
    ``P(a_0 + ... + a_{p-1} eps**{p-1}, eps)`` via Cauchy products.
    """
    if not P.integer_powers:
        raise ValueError("expand_root needs integer eps powers; substitute delta = eps**(1/d) first")
    if any(e < 0 for _, c in P.terms for e, _ in c):
        raise ValueError("negative eps powers: normalise with rescale() first")
    if N < 0:
        raise ValueError("order must be nonnegative")
    a0 = _canonical_root(P, a0)
    if abs(float(P(a0, 0))) > 1e-10 * max(1.0, P.scale(a0, 0)):
        raise ValueError(f"{a0} is not a root of P(x, 0)")
    L = P.dx(a0, 0)
    if abs(float(L)) < SIMPLE_ROOT_TOL:
        raise SingularHierarchy(f"dP/dx(a0, 0) = {L}: the regular expansion does not exist")

    coeffs = [a0] + [0] * N
    rhs = []
    for p in range(1, N + 1):
        # With a_p = 0 the eps**p coefficient is exactly -r_p.
        residual = _substituted_coeffs(P, coeffs[: p + 1], p)[p]
        r_p = -residual
        coeffs[p] = r_p / L
        rhs.append(r_p)
    return RootExpansion(
        base_root=a0,
        coeffs=AsymptoticSeries(tuple(coeffs), GaugeSequence(0)),
        linear_operator_value=L,
        hierarchy_rhs=tuple(rhs),
    )


@dataclass(frozen=True)
class Rescaled:
    """Result of :func:`rescale`: ``polynomial(y) = eps**q * P(eps**-p y, eps)``."""

    polynomial: PerturbedPolynomial
    p: Fraction
    q: Fraction


def rescale_with_power(P: PerturbedPolynomial, p) -> Rescaled:
    p = _frac(p)
    if p < 0:
        raise ValueError("rescaling exponent must be nonnegative")
    shifted = {}
    for j, c in P.terms:
        shifted[j] = {e - p * j: a for e, a in c}
    lowest = min(e for c in shifted.values() for e in c)
    q = -lowest
    out = {j: {e + q: a for e, a in c.items()} for j, c in shifted.items()}
    return Rescaled(PerturbedPolynomial.from_dict(out), p, q)


def rescale(P: PerturbedPolynomial, p) -> PerturbedPolynomial:
    """Substitute ``x = eps**-p y`` and shift so the lowest eps power is zero."""
    return rescale_with_power(P, p).polynomial


def find_balance_exponents(P: PerturbedPolynomial, max_denominator: int = MAX_BALANCE_DENOMINATOR) -> list[Fraction]:
    """Exponents ``p > 0`` at which two or more terms dominate after rescaling."""
    if len(P.terms) < 2:
        raise ValueError("need at least two terms")
    lead = [(j, min(e for e, _ in c)) for j, c in P.terms]
    found = set()
    for i, (ji, ei) in enumerate(lead):
        for jk, ek in lead[i + 1:]:
            p = Fraction(ei - ek, ji - jk) if ji != jk else None
            if p is None or p <= 0 or p.denominator > max_denominator:
                continue
            exps = [e - p * j for j, e in lead]
            m = min(exps)
            if sum(1 for e in exps if e == m) >= 2:
                found.add(p)
    return sorted(found)


def exact_root_oracle(P: PerturbedPolynomial, eps, near: float, max_iter: int = 100) -> float:
    """Root of ``P(., eps)`` nearest ``near`` by damped Newton iteration."""
    x = float(near)
    e = float(eps)
    f = float(P(x, e))
    for _ in range(max_iter):
        d = float(P.dx(x, e))
        tol = 1e-13 * max(1.0, P.scale(x, e))
        if abs(f) <= tol and _ > 0:
            return x
        if d == 0:
            raise ConvergenceFailure(f"zero derivative at x={x}")
        step = f / d
        lam = 1.0
        # Halve the step until the residual decreases (bounded number of halvings).
        for _h in range(30):
            xn = x - lam * step
            fn = float(P(xn, e))
            if abs(fn) < abs(f) or abs(fn) <= tol:
                break
            lam *= 0.5
        x, f = xn, fn
        if abs(f) <= tol:
            return x
    raise ConvergenceFailure(f"Newton did not converge from {near} in {max_iter} iterations")


# Polynomials worked through in the examples.

def quadratic_regular() -> PerturbedPolynomial:
    """``x**2 - x + eps``."""
    return PerturbedPolynomial.from_pairs([(2, 0, 1), (1, 0, -1), (0, 1, 1)])


def quintic() -> PerturbedPolynomial:
    """``x**5 - 2 x + eps``."""
    return PerturbedPolynomial.from_pairs([(5, 0, 1), (1, 0, -2), (0, 1, 1)])


def quadratic_singular() -> PerturbedPolynomial:
    """``eps x**2 + x - 1``."""
    return PerturbedPolynomial.from_pairs([(2, 1, 1), (1, 0, 1), (0, 0, -1)])


def singular_composite(expansion: RootExpansion, p, eps, order: int | None = None):
    """Map an expansion of the rescaled root back: ``x = eps**-p * y(eps)``."""
    p = _frac(p)
    return _eps_pow(eps, -p) * expansion(eps, order)

"""Finite stationary-phase expansions of polynomial section curves.

For ``V(t) = sum_j a_j t^j`` on ``[h-, h+]``

    int_{h-}^{h+} exp(i r t) V(t) dt
        = exp(i r h+) sum_m q+_m (ir)^-m + exp(i r h-) sum_m q-_m (ir)^-m,

with ``q+_m = (-1)^(m-1) V^(m-1)(h+)`` and ``q-_m = -(-1)^(m-1) V^(m-1)(h-)``,
``m = 1..N+1``. The coefficient algebra runs in :class:`fractions.Fraction`
(floats convert exactly), so expansion and inversion round-trip exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .exceptions import DomainError, InputError
from .polyfit import POLYNOMIAL, fit_polynomial
from .sections import fourier_chi, section_curve

FINITE = "finite"
NON_FINITE = "non_finite"
INCONCLUSIVE = "inconclusive"


def _frac(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(float(x))


@dataclass(frozen=True)
class PhaseExpansion:
    """Coefficients of ``(ir)^-m``, ``m = 1..N+1``, at each support endpoint."""

    h_minus: Fraction
    h_plus: Fraction
    q_plus: tuple
    q_minus: tuple

    @property
    def order(self):
        return len(self.q_plus)

    def to_dict(self):
        def enc(q):
            return [{"re_num": c.numerator, "re_den": c.denominator, "im_num": 0, "im_den": 1} for c in q]

        return {"h_plus": float(self.h_plus), "h_minus": float(self.h_minus),
                "h_plus_exact": [self.h_plus.numerator, self.h_plus.denominator],
                "h_minus_exact": [self.h_minus.numerator, self.h_minus.denominator],
                "q_plus": enc(self.q_plus), "q_minus": enc(self.q_minus)}

    @classmethod
    def from_dict(cls, d):
        def dec(q):
            out = []
            for c in q:
                if c.get("im_num", 0):
                    raise InputError("complex expansion coefficients are not supported")
                out.append(Fraction(int(c["re_num"]), int(c["re_den"])))
            return tuple(out)

        hp = Fraction(*d["h_plus_exact"]) if "h_plus_exact" in d else _frac(d["h_plus"])
        hm = Fraction(*d["h_minus_exact"]) if "h_minus_exact" in d else _frac(d["h_minus"])
        return cls(hm, hp, dec(d["q_plus"]), dec(d["q_minus"]))


def phase_expansion(coefficients, h_minus, h_plus):
    """Exact expansion of ``int_{h-}^{h+} exp(irt) sum a_j t^j dt``.

    Uses ``int t^j e^{irt} dt = e^{irt} sum_{m=0}^{j} (-1)^m j!/(j-m)! t^{j-m} (ir)^{-(m+1)}``
    at both endpoints. No quadrature is involved.
    """
    a = [_frac(c) for c in coefficients]
    if not a:
        raise InputError("need at least one coefficient")
    hm, hp = _frac(h_minus), _frac(h_plus)
    if not hm < hp:
        raise InputError("need h_minus < h_plus")
    N = len(a) - 1
    q_plus = [Fraction(0)] * (N + 1)
    q_minus = [Fraction(0)] * (N + 1)
    for j, aj in enumerate(a):
        if aj == 0:
            continue
        for m in range(j + 1):
            falling = math.factorial(j) // math.factorial(j - m)
            c = aj * (-1) ** m * falling
            q_plus[m] += c * hp ** (j - m)
            q_minus[m] -= c * hm ** (j - m)
    return PhaseExpansion(hm, hp, tuple(q_plus), tuple(q_minus))


def eval_expansion(e, r, terms=None, dps=40):
    """Evaluate the expansion at ``r != 0`` (complex).

    ``terms`` truncates both sums to the first ``terms`` powers. Evaluation
    runs in ``dps``-digit arithmetic to avoid cancellation at small ``r``.
    """
    r = float(r)
    if r == 0.0:
        raise DomainError("the expansion is in powers of 1/r; use moments at r = 0")
    k = e.order if terms is None else min(int(terms), e.order)
    with mpmath.workdps(dps):
        ir = mpmath.mpc(0, r)
        total = mpmath.mpc(0)
        for h, q in ((e.h_plus, e.q_plus), (e.h_minus, e.q_minus)):
            phase = mpmath.exp(ir * mpmath.mpf(h.numerator) / h.denominator)
            s = mpmath.mpc(0)
            for m in range(1, k + 1):
                c = q[m - 1]
                if c:
                    s += (mpmath.mpf(c.numerator) / c.denominator) / ir ** m
            total += phase * s
        return complex(total)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Monomial coefficients on ``(-inf, h-)``, ``[h-, h+]`` and ``(h+, inf)``."""

    breakpoints: tuple
    pieces: tuple

    @property
    def coefficients(self):
        return self.pieces[1]

    def __call__(self, t):
        hm, hp = (float(b) for b in self.breakpoints)
        t = float(t)
        piece = self.pieces[0] if t < hm else self.pieces[1] if t <= hp else self.pieces[2]
        return sum(float(c) * t ** k for k, c in enumerate(piece))


def _shifted_power(h, k):
    """Monomial coefficients of ``(t - h)^k``."""
    return [math.comb(k, i) * (-h) ** (k - i) for i in range(k + 1)]


def _term_polynomial(q, h):
    """Inverse transform of ``exp(i r h) sum_k q_k (ir)^-k`` on ``t < h`` (zero for ``t > h``).

    ``exp(irh) (ir)^-k`` is the transform of ``(-1)^(k-1) (t-h)^(k-1) / (k-1)!`` on ``t < h``.
    """
    out = [Fraction(0)] * len(q)
    for k, qk in enumerate(q, start=1):
        if qk == 0:
            continue
        c = qk * (-1) ** (k - 1) / math.factorial(k - 1)
        for i, b in enumerate(_shifted_power(h, k - 1)):
            out[i] += c * b
    return out


def _trim(coeffs):
    coeffs = list(coeffs)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def inverse_expansion(e):
    """Recover the piecewise-polynomial ``V`` whose transform is the expansion.

    Each endpoint's terms invert to a polynomial on the half-line left of
    that endpoint; the sum must vanish left of ``h-`` for a compactly
    supported preimage. Raises :class:`InputError` otherwise.
    """
    if len(e.q_plus) != len(e.q_minus):
        raise InputError("not a finite-expansion transform: q+ and q- lengths differ")
    if not e.h_minus < e.h_plus:
        raise InputError("need h_minus < h_plus")
    upper = _term_polynomial(e.q_plus, e.h_plus)
    lower = _term_polynomial(e.q_minus, e.h_minus)
    left = [u + w for u, w in zip(upper, lower)]
    if any(c != 0 for c in left):
        raise InputError("not a finite-expansion transform: no compactly supported polynomial preimage")
    zero = (Fraction(0),)
    return PiecewisePolynomial((e.h_minus, e.h_plus), (zero, tuple(_trim(upper)), zero))


# -- finiteness diagnostics --------------------------------------------------


@dataclass(frozen=True)
class FinitenessReport:
    verdict: str
    r_values: tuple
    exact: tuple
    full_residuals: tuple
    truncation_residuals: tuple
    decay_slopes: tuple
    floor: float
    fit_verdict: str
    fit_degree: int

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "r": list(self.r_values),
            "full_residuals": list(self.full_residuals) if self.full_residuals else None,
            "truncation_residuals": [list(row) for row in self.truncation_residuals],
            "decay_slopes": list(self.decay_slopes),
            "floor": self.floor,
            "fit_verdict": self.fit_verdict,
            "fit_degree": self.fit_degree,
        }


def endpoint_expansion(curve, terms):
    """Truncated expansion built from derivatives of the curve's interpolant at its ends."""
    cheb = curve.chebyshev()
    q_plus, q_minus = [], []
    for m in range(1, terms + 1):
        d = cheb.deriv(m - 1) if m > 1 else cheb
        sign = (-1) ** (m - 1)
        q_plus.append(_frac(sign * float(d(curve.h_plus))))
        q_minus.append(_frac(-sign * float(d(curve.h_minus))))
    return PhaseExpansion(_frac(curve.h_minus), _frac(curve.h_plus), tuple(q_plus), tuple(q_minus))


def finiteness_check(body, omega, r_values, N_max=8, m=64, tol=1e-7, floor=None):
    """Classify the stationary-phase regime of ``chi_D^(r omega)``.

    A heuristic: it reports evidence, not proof. ``finite`` means the full
    expansion of the fitted polynomial reproduces the numerical transform
    to quadrature level at every ``r``. ``non_finite`` means no truncation
    up to ``N_max + 1`` terms reaches that level at the smallest ``r`` while
    each truncation's residual decays with ``r``, as for a genuine
    asymptotic series.
    """
    r = np.asarray(sorted(float(x) for x in r_values))
    if r.size < 2 or r[0] <= 0 or r[-1] / r[0] < 100:
        raise InputError("r values must be positive and span at least two decades")
    curve = section_curve(body, omega, m)
    exact = np.array([fourier_chi(body, omega, x) for x in r])
    if floor is None:
        noise = float(np.max(curve.est_error)) * curve.width
        floor = max(1e-9 * max(1.0, body.volume()), 10.0 * noise)

    fit = fit_polynomial(curve, N_max, tol) if m >= N_max + 8 else None
    full = None
    if fit is not None and fit.verdict == POLYNOMIAL:
        e = phase_expansion(fit.coefficients, curve.h_minus, curve.h_plus)
        full = np.array([abs(eval_expansion(e, x) - ex) for x, ex in zip(r, exact)])

    trunc = endpoint_expansion(curve, N_max + 1)
    table = np.array([[abs(eval_expansion(trunc, x, terms=k) - ex) for x, ex in zip(r, exact)]
                      for k in range(1, N_max + 2)])
    slopes = []
    for row in table:
        good = row > 0
        if np.count_nonzero(good) >= 2:
            slopes.append(float(np.polyfit(np.log(r[good]), np.log(row[good]), 1)[0]))
        else:
            slopes.append(float("-inf"))

    if full is not None and np.all(full <= floor):
        verdict = FINITE
    elif np.min(table[:, 0]) > 100.0 * floor and slopes[0] < -1.0:
        verdict = NON_FINITE
    else:
        verdict = INCONCLUSIVE
    return FinitenessReport(verdict, tuple(r.tolist()), tuple(complex(v) for v in exact),
                            tuple(full.tolist()) if full is not None else (),
                            tuple(tuple(row.tolist()) for row in table), tuple(slopes), float(floor),
                            fit.verdict if fit else "not_fitted", fit.degree if fit else -1)

"""Closed-form limiting objects for the three stickiness scalings.

With delta_n -> infinity, the rescaled endpoint law has three regimes
according to how delta_n compares to sqrt(n): far below it the coordinates
decouple into a product of standard normals, far above they fuse into a
single normal, and on the critical scale delta_n ~ alpha sqrt(n) the Fourier
transform picks up an integral of the occupation profile ell_{alpha,w}.

ell is assembled from erfcx with parameters b1 = -2/alpha + 2*gamma and
b2 = -2/alpha - 2*gamma, gamma = sqrt(alpha^-2 - w^2/4) (taken with positive
imaginary part when the discriminant is negative).  Raw exp * erfc products
are never formed: b2 makes exp(b2^2 x / 4) overflow at moderate x while the
matching erfc underflows, and the scaled form sidesteps both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .exact import gf_h0_reciprocal
from .kernel import StickinessParam
from .specfun import erfcx_complex, erfcx_real, integrate_01

__all__ = [
    "LimitParams",
    "RegimeSpec",
    "limit_params",
    "ell",
    "laplace_target",
    "laplace_empirical",
    "phi_critical",
    "limit_cf",
    "covariance_limit",
    "laplace_numeric",
    "ell_laplace_numeric",
    "subcritical_density",
    "supercritical_density",
]

_SQRT_PI = math.sqrt(math.pi)
_DEGENERATE_RTOL = 1e-12
_IMAG_TOL = 1e-8
# truncate infinite Laplace quadratures where exp(-lam x) < 1e-12
_TRUNC_LOG = 12.0 * math.log(10.0)

REGIME_KINDS = ("subcritical", "critical", "supercritical")


@dataclass(frozen=True)
class LimitParams:
    """Parameters of the critical occupation profile at Fourier argument w."""

    alpha: float
    w: float
    gamma: complex
    b1: complex
    b2: complex
    degenerate: bool


def limit_params(alpha: float, w: float) -> LimitParams:
    """gamma, b1, b2 for (alpha, w); flags the degenerate case alpha^-2 = w^2/4."""
    alpha = float(alpha)
    w = float(w)
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValueError(f"alpha must be finite and > 0, got {alpha!r}")
    if not math.isfinite(w):
        raise ValueError(f"w must be finite, got {w!r}")
    inv_a2 = 1.0 / (alpha * alpha)
    quarter_w2 = 0.25 * w * w
    disc = inv_a2 - quarter_w2
    degenerate = abs(disc) <= _DEGENERATE_RTOL * max(inv_a2, quarter_w2)
    if disc >= 0.0:
        gamma = complex(math.sqrt(disc), 0.0)
    else:
        gamma = complex(0.0, math.sqrt(-disc))
    b1 = -2.0 / alpha + 2.0 * gamma
    b2 = -2.0 / alpha - 2.0 * gamma
    return LimitParams(alpha=alpha, w=w, gamma=gamma, b1=b1, b2=b2, degenerate=degenerate)


def ell(params: LimitParams, x: float) -> float:
    """The occupation profile ell_{alpha,w}(x) for x >= 0; ell(0) = 1.

    Generic form: (1/2 gamma) e^{-w^2 x/4} [ (b1/2) erfcx(-(b1/2) sqrt(x))
    - (b2/2) erfcx(-(b2/2) sqrt(x)) ].  When gamma is imaginary the two terms
    are conjugates; the imaginary residue is checked against a 1e-8 budget
    and discarded.  The degenerate branch is the explicit limit formula.
    """
    x = float(x)
    if not (x >= 0.0):
        raise ValueError(f"x must be >= 0, got {x!r}")
    damp = math.exp(-0.25 * params.w * params.w * x)
    sx = math.sqrt(x)
    if params.degenerate:
        a = params.alpha
        bracket = -4.0 * sx / (a * _SQRT_PI) + (4.0 * x / (a * a) + 2.0) * erfcx_real(sx / a)
        return 0.5 * damp * bracket
    if params.gamma.imag == 0.0:
        g = params.gamma.real
        b1 = params.b1.real
        b2 = params.b2.real
        bracket = 0.5 * b1 * erfcx_real(-0.5 * b1 * sx) - 0.5 * b2 * erfcx_real(-0.5 * b2 * sx)
        return damp * bracket / (2.0 * g)
    t1 = 0.5 * params.b1 * erfcx_complex(-0.5 * params.b1 * sx)
    t2 = 0.5 * params.b2 * erfcx_complex(-0.5 * params.b2 * sx)
    value = damp * (t1 - t2) / (2.0 * params.gamma)
    if abs(value.imag) > _IMAG_TOL:
        raise ArithmeticError(
            f"conjugate-pair evaluation left imaginary residue {value.imag:.3e}"
        )
    return value.real


@dataclass(frozen=True)
class RegimeSpec:
    """Which delta_n scaling is under test.

    critical uses delta_n = alpha sqrt(n); the other two use
    delta_n = coeff * n**exponent with exponent below / above 1/2.
    """

    kind: str
    alpha: float | None = None
    coeff: float = 1.0
    exponent: float | None = None

    def __post_init__(self):
        if self.kind not in REGIME_KINDS:
            raise ValueError(f"kind must be one of {REGIME_KINDS}, got {self.kind!r}")
        if self.kind == "critical":
            if self.alpha is None or not (self.alpha > 0):
                raise ValueError("critical regime needs alpha > 0")
            return
        exponent = self.exponent
        if exponent is None:
            exponent = 0.25 if self.kind == "subcritical" else 1.0
            object.__setattr__(self, "exponent", exponent)
        if not (self.coeff > 0):
            raise ValueError("coeff must be > 0")
        if self.kind == "subcritical" and not (0.0 < exponent < 0.5):
            raise ValueError("subcritical needs exponent in (0, 1/2) so delta_n -> inf below sqrt(n)")
        if self.kind == "supercritical" and not (exponent > 0.5):
            raise ValueError("supercritical needs exponent > 1/2")

    @classmethod
    def subcritical(cls, coeff: float = 1.0, exponent: float = 0.25) -> "RegimeSpec":
        return cls(kind="subcritical", coeff=coeff, exponent=exponent)

    @classmethod
    def critical(cls, alpha: float) -> "RegimeSpec":
        return cls(kind="critical", alpha=alpha)

    @classmethod
    def supercritical(cls, coeff: float = 1.0, exponent: float = 1.0) -> "RegimeSpec":
        return cls(kind="supercritical", coeff=coeff, exponent=exponent)

    def delta_at(self, n: int) -> float:
        """delta_n under this regime's rule (kept real, never rounded to integer)."""
        if self.kind == "critical":
            return self.alpha * math.sqrt(n)
        return self.coeff * float(n) ** self.exponent


def laplace_target(regime: RegimeSpec, w: float, lam: float) -> float:
    """Limiting Laplace-transform value for the regime at (w, lam)."""
    if not (lam > 0.0):
        raise ValueError("lam must be > 0")
    root = math.sqrt(4.0 * lam + w * w)
    if regime.kind == "subcritical":
        return 1.0 / root
    if regime.kind == "critical":
        return 1.0 / (0.5 * w * w + lam + root / regime.alpha)
    return 1.0 / (0.5 * w * w + lam)


def laplace_empirical(delta: float, n: int, w: float, lam: float) -> float:
    """n^-1 H(0, w / sqrt(n), exp(-lam / n)) from the closed form; O(1) in n.

    The subcritical comparison additionally rescales this by sqrt(n) / delta_n
    (callers do that; this function always returns the plain n^-1 H value).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (lam > 0.0):
        raise ValueError("lam must be > 0")
    ratio = lam / n
    if ratio < 1e-15:
        raise ValueError("lam / n below the double-precision resolution of 1 - z")
    p = StickinessParam(delta)
    t = w / math.sqrt(n)
    z = math.exp(-ratio)
    one_minus_z = -math.expm1(-ratio)
    return 1.0 / (n * gf_h0_reciprocal(p, t, z, one_minus_z=one_minus_z))


def phi_critical(alpha: float, s: float, t: float, tol: float = 1e-10) -> float:
    """Critical limiting Fourier transform:

    exp(-(s^2+t^2)/2) [ 1 - t s  integral_0^1 exp((s^2+t^2) x / 2) ell_{alpha,s+t}(x) dx ].
    """
    theta = 0.5 * (s * s + t * t)
    gauss = math.exp(-theta)
    if s == 0.0 or t == 0.0:
        return gauss
    params = limit_params(alpha, s + t)
    weighted = integrate_01(lambda x: math.exp(theta * x) * ell(params, x), tol=tol)
    return gauss * (1.0 - t * s * weighted)


def limit_cf(regime: RegimeSpec, s: float, t: float, tol: float = 1e-10) -> float:
    """Limiting characteristic function of the rescaled endpoint under the regime."""
    if regime.kind == "subcritical":
        return math.exp(-0.5 * (s * s + t * t))
    if regime.kind == "supercritical":
        return math.exp(-0.5 * (s + t) ** 2)
    return phi_critical(regime.alpha, s, t, tol=tol)


def covariance_limit(alpha: float, tol: float = 1e-8) -> float:
    """Limit of n^-1 E[x y] under delta_n = alpha sqrt(n):

    integral_0^1 exp(4 v / alpha^2) erfc(2 sqrt(v) / alpha) dv, evaluated as
    integral_0^1 erfcx(2 sqrt(v) / alpha) dv.  Value in (0, 1).
    """
    if not (alpha > 0.0):
        raise ValueError("alpha must be > 0")
    return integrate_01(
        lambda v: erfcx_real(2.0 * math.sqrt(v) / alpha),
        singular_sqrt_at_zero=True,
        tol=tol,
    )


def laplace_numeric(
    f: Callable[[float], float],
    lam: float,
    tol: float = 1e-9,
    sqrt_singular_at_zero: bool = False,
) -> float:
    """integral_0^inf exp(-lam x) f(x) dx by quadrature, truncated where
    exp(-lam x) < 1e-12 (f is assumed bounded by ~1 in the tail)."""
    if not (lam > 0.0):
        raise ValueError("lam must be > 0")
    x_star = _TRUNC_LOG / lam

    def rescaled(v: float) -> float:
        x = x_star * v
        return x_star * math.exp(-lam * x) * f(x)

    return integrate_01(rescaled, singular_sqrt_at_zero=sqrt_singular_at_zero, tol=tol)


def ell_laplace_numeric(alpha: float, w: float, lam: float, tol: float = 1e-9) -> float:
    """Numerical Laplace transform of ell_{alpha,w}; the closed-form answer is
    the critical laplace_target.  The x = y^2 substitution absorbs the
    sqrt(x) cusp of ell at the origin."""
    params = limit_params(alpha, w)
    return laplace_numeric(lambda x: ell(params, x), lam, tol=tol, sqrt_singular_at_zero=True)


def subcritical_density(w: float, x: float) -> float:
    """Density on (0, inf) whose Laplace transform is 1 / sqrt(4 lam + w^2):

    exp(-w^2 x / 4) / (2 sqrt(pi x)).  Carries a 1/sqrt(x) endpoint
    singularity, so quadratures against it want the x = y^2 substitution.
    """
    if not (x > 0.0):
        raise ValueError("x must be > 0")
    return math.exp(-0.25 * w * w * x) / (2.0 * math.sqrt(math.pi * x))


def supercritical_density(w: float, x: float) -> float:
    """Density on (0, inf) whose Laplace transform is 1 / (w^2/2 + lam)."""
    if not (x >= 0.0):
        raise ValueError("x must be >= 0")
    return math.exp(-0.5 * w * w * x)

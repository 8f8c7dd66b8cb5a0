"""Lower-bound iteration machinery and the explicit lifespan constant.

Inside the spacetime region

    Sigma_delta = {(t, r) : r - t >= max(2 t / delta_m, delta)},

positive radial data produce the seed estimate

    u(t, r) >= C0 t^(m+1) / (r^m (r+t)^(kbar+1)),
    C0 = eps 2^(m-2) M delta_m^(-m) (delta/(1+delta))^(kbar+1),

with m = floor(n/2), and feeding any such estimate through the Duhamel
term tightens it to the same shape with updated exponents and constant:

    a' = p (a - mu/2) + 2 + mu/2,
    b' = p b + m (p - 1),
    C' = (C/2)^p / (2 (p a + 2)^2),

seeded by (a1, b1, C1) = (m+1, kbar+1, C0).  C_k behaves like
exp(+-p^k), so the constant is carried as log C_k throughout.  The
minimum K of the explicit minimand p^(2k) / (2^(p+1) (p a_k + 2)^2)
(including its k -> infinity limit) gives C_(k+1) >= K C_k^p / p^(2k),
which unrolls to

    log C_(k+1) >= p^k (log C0 - S(k)),
    S(k) = sum_(j=1..k) (j log p^2 - log K) / p^j,

and S(k) is dominated by its limit S_limit.  Positivity of

    J(t, r) = log C0 - S_limit + (m + 1 - mu/2 + 2/(p-1)) log t
              - (kbar + 1 + m) log(r + t)

at a single Sigma_delta point with t > 1 makes the envelope diverge
doubly exponentially, which yields the lifespan bound

    T(eps) <= C eps^(-1/(2/(p-1) - mu/2 - kbar)),

with C fully explicit in (p, mu, m, kbar, M, delta, delta_m).

`free_lower_bound` and `verify_iteration_step` are quadrature oracles:
they evaluate the underlying integrals numerically and check the claimed
inequalities pointwise, independent of the closed-form path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import dblquad, quad

from .exponents import HypothesisError, ModelParams, fujita

__all__ = [
    "BoundConfig",
    "IterationState",
    "IterationConstants",
    "LifespanBound",
    "IterationStepReport",
    "in_sigma",
    "seed_constant",
    "initial_state",
    "iterate",
    "closed_form",
    "derive_K",
    "J",
    "lifespan_upper_bound",
    "free_lower_bound",
    "verify_iteration_step",
]


@dataclass(frozen=True)
class BoundConfig:
    """Parameters plus the two region constants of the estimate machinery.

    delta_m is NOT computed here: it is the dimension-dependent constant of
    the pointwise free-wave estimate, supplied by the user.  Every bound
    derived from this config is conditional on that choice.
    """

    params: ModelParams
    delta: float = 1.0
    delta_m: float = 1.0

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError(f"delta must be > 0, got {self.delta}")
        if not self.delta_m > 0:
            raise ValueError(f"delta_m must be > 0, got {self.delta_m}")


@dataclass(frozen=True)
class IterationState:
    """One rung (a_k, b_k, log C_k) of the lower-bound ladder."""

    k: int
    a: float
    b: float
    logC: float


@dataclass(frozen=True)
class IterationConstants:
    """Derived constants of the iteration: K, the series limit S_limit,
    the index attaining the K-minimum (0 = attained in the tail limit),
    and log C0."""

    K: float
    S_limit: float
    k_star: int
    logC0: float


@dataclass(frozen=True)
class LifespanBound:
    C: float
    exponent: float
    T_upper: float


def in_sigma(t: float, r: float, cfg: BoundConfig) -> bool:
    """Membership in Sigma_delta: r - t >= max(2 t / delta_m, delta)."""
    if not t > 0 or not r > 0:
        raise ValueError(f"in_sigma requires t > 0 and r > 0, got t={t}, r={r}")
    return r - t >= max(2.0 * t / cfg.delta_m, cfg.delta)


def seed_constant(cfg: BoundConfig) -> float:
    """log C0 with C0 = eps 2^(m-2) M delta_m^(-m) (delta/(1+delta))^(kbar+1)."""
    P = cfg.params
    m = P.m
    return (
        math.log(P.eps)
        + (m - 2) * math.log(2.0)
        + math.log(P.M)
        - m * math.log(cfg.delta_m)
        + (P.kbar + 1.0) * math.log(cfg.delta / (1.0 + cfg.delta))
    )


def initial_state(cfg: BoundConfig) -> IterationState:
    """Seed rung (a1, b1, log C1) = (m+1, kbar+1, log C0)."""
    P = cfg.params
    return IterationState(k=1, a=P.m + 1.0, b=P.kbar + 1.0, logC=seed_constant(cfg))


def iterate(state: IterationState, cfg: BoundConfig) -> IterationState:
    """Advance one rung; the constant update runs entirely in log space."""
    if state.k < 1:
        raise ValueError(f"iteration index must be >= 1, got {state.k}")
    P = cfg.params
    p, mu, m = P.p, P.mu, P.m
    a_next = p * (state.a - mu / 2.0) + 2.0 + mu / 2.0
    b_next = p * state.b + m * (p - 1.0)
    logC_next = p * (state.logC - math.log(2.0)) - math.log(2.0) - 2.0 * math.log(p * state.a + 2.0)
    return IterationState(k=state.k + 1, a=a_next, b=b_next, logC=logC_next)


def _growth_coefficients(cfg: BoundConfig) -> tuple[float, float]:
    """(A, B) with a_k = A p^(k-1) + B; A = m + 1 - mu/2 + 2/(p-1)."""
    P = cfg.params
    A = P.m + 1.0 - P.mu / 2.0 + 2.0 / (P.p - 1.0)
    B = P.mu / 2.0 - 2.0 / (P.p - 1.0)
    return A, B


def closed_form(k: int, cfg: BoundConfig) -> tuple[float, float]:
    """(a_k, b_k) in closed form; k = 1 returns the seeds exactly."""
    if k < 1:
        raise ValueError(f"closed_form requires k >= 1, got {k}")
    P = cfg.params
    A, B = _growth_coefficients(cfg)
    pk = P.p ** (k - 1)
    a = A * pk + B
    b = (P.kbar + 1.0 + P.m) * pk - P.m
    return a, b


def _geometric_tails(x: float, j: int) -> tuple[float, float]:
    """Exact tails sum_{i>j} x^i and sum_{i>j} i x^i for 0 < x < 1."""
    t1 = x ** (j + 1) / (1.0 - x)
    t2 = x ** (j + 1) * ((j + 1) - j * x) / (1.0 - x) ** 2
    return t1, t2


def derive_K(cfg: BoundConfig, k_max: int = 200) -> IterationConstants:
    """Construct K as the infimum of the explicit minimand

        p^(2k) / (2^(p+1) (p a_k + 2)^2)
            = 1 / (2^(p+1) (A + (p B + 2) p^(-k))^2)

    over k in [1, k_max] together with its analytic tail limit
    1 / (2^(p+1) A^2).  The minimand is monotone in k (the p^(-k) term
    has one sign), so this is the true infimum over all k; convergence to
    the tail within k_max is verified and a failure asks for a larger
    k_max.  S_limit accumulates (j log p^2 - log K)/p^j until the exact
    geometric tail drops below 1e-16.
    """
    P = cfg.params
    p = P.p
    if k_max < 10:
        raise ValueError(f"k_max must be >= 10, got {k_max}")
    A, B = _growth_coefficients(cfg)
    if not A > 0:
        raise HypothesisError(
            f"iteration growth coefficient m + 1 - mu/2 + 2/(p-1) must be positive, got {A}"
        )

    scale = 2.0 ** (p + 1.0)
    shift = p * B + 2.0

    def minimand(k: int) -> float:
        return 1.0 / (scale * (A + shift * p ** (-k)) ** 2)

    tail = 1.0 / (scale * A * A)
    K = tail
    k_star = 0
    for k in range(1, k_max + 1):
        v = minimand(k)
        if v < K:
            K = v
            k_star = k
    if abs(minimand(k_max) - tail) > 1e-9 * tail:
        raise ValueError(
            f"minimand has not converged to its tail limit within k_max={k_max}; increase k_max"
        )

    x = 1.0 / p
    L = math.log(p * p)
    logK = math.log(K)
    S = 0.0
    j = 0
    while True:
        j += 1
        if j > 200_000:
            raise ValueError("series for S_limit failed to converge; p too close to 1")
        S += (j * L - logK) * x**j
        t1, t2 = _geometric_tails(x, j)
        if L * t2 + abs(logK) * t1 < 1e-16:
            break

    return IterationConstants(K=K, S_limit=S, k_star=k_star, logC0=seed_constant(cfg))


def J(t: float, r: float, consts: IterationConstants, cfg: BoundConfig) -> float:
    """Divergence functional; J > 0 at a Sigma_delta point forces blow-up.

    Requires t > 1 (the standing assumption of the estimate chain).
    """
    if not t > 1:
        raise ValueError(f"J requires t > 1, got {t}")
    if not r > 0:
        raise ValueError(f"J requires r > 0, got {r}")
    P = cfg.params
    A, _ = _growth_coefficients(cfg)
    return consts.logC0 - consts.S_limit + A * math.log(t) - (P.kbar + 1.0 + P.m) * math.log(r + t)


def lifespan_upper_bound(cfg: BoundConfig, k_max: int = 200) -> LifespanBound:
    """Explicit bound T(eps) <= C eps^(-exponent), with

        C = (e^S_limit delta_m^m / (2^(m-2) M) ((1+delta)/delta)^(kbar+1)
             (2 + 2/delta_m)^(1+kbar+m))^exponent,
        exponent = 1 / (2/(p-1) - mu/2 - kbar).

    Preconditions: kbar < 2/(p-1) - mu/2, and p < p_F(mu/2 - 1) when
    mu > 2.  C does not depend on eps.
    """
    P = cfg.params
    if P.mu > 2.0 and not P.p < fujita(P.mu / 2.0 - 1.0):
        raise HypothesisError(
            f"p < p_F(mu/2 - 1) required when mu > 2: p={P.p}, p_F={fujita(P.mu / 2.0 - 1.0)}"
        )
    denom = 2.0 / (P.p - 1.0) - P.mu / 2.0 - P.kbar
    if not denom > 0:
        raise HypothesisError(
            f"kbar < 2/(p-1) - mu/2 fails: kbar={P.kbar}, 2/(p-1) - mu/2={P.kbar + denom}"
        )
    consts = derive_K(cfg, k_max=k_max)
    m = P.m
    log_inner = (
        consts.S_limit
        + m * math.log(cfg.delta_m)
        - (m - 2) * math.log(2.0)
        - math.log(P.M)
        + (P.kbar + 1.0) * math.log((1.0 + cfg.delta) / cfg.delta)
        + (1.0 + P.kbar + m) * math.log(2.0 + 2.0 / cfg.delta_m)
    )
    exponent = 1.0 / denom
    C = math.exp(exponent * log_inner)
    return LifespanBound(C=C, exponent=exponent, T_upper=C * P.eps ** (-exponent))


def free_lower_bound(t: float, r: float, cfg: BoundConfig) -> float:
    """Quadrature evaluation of the free-wave floor

        eps/(8 r^m) * integral_(r-t)^(r+t) s^m M (1+s)^(-(kbar+1)) ds

    at a Sigma_delta point (relative quadrature error < 1e-10)."""
    if not in_sigma(t, r, cfg):
        raise ValueError(f"(t, r) = ({t}, {r}) lies outside Sigma_delta")
    P = cfg.params
    m, kb = P.m, P.kbar

    integral, _ = quad(
        lambda s: s**m * (1.0 + s) ** (-(kb + 1.0)), r - t, r + t, epsabs=0.0, epsrel=1e-10, limit=200
    )
    return P.eps * P.M / (8.0 * r**m) * integral


@dataclass(frozen=True)
class IterationStepReport:
    """Pointwise oracle results: LHS/RHS ratios of one iteration step."""

    samples: tuple[tuple[float, float], ...]
    ratios: tuple[float, ...]
    worst_ratio: float
    slack: float
    passed: bool


def verify_iteration_step(
    state: IterationState,
    samples: list[tuple[float, float]],
    cfg: BoundConfig,
    epsrel: float = 1e-8,
    slack: float = 1e-6,
) -> IterationStepReport:
    """Check one rung of the ladder against 2-D quadrature.

    Plugs the current envelope C t^a / (r^m (r+t)^b) into the Duhamel
    term,

        1/(8 r^m) int_0^t int_(r-t+tau)^(r+t-tau)
            s^m (1+tau)^(-mu(p-1)/2) [C tau^a / (s^m (s+tau)^b)]^p ds dtau,

    and requires the result to dominate the next envelope
    C' t^a' / (r^m (r+t)^b').  Ratios are computed with C scaled out, so
    the check is unaffected by the doubly exponential constant.  Samples
    must lie in Sigma_delta with t > 1.  A ratio below 1 - slack beyond
    quadrature tolerance falsifies the implementation, not the estimate.
    """
    P = cfg.params
    p, mu, m = P.p, P.mu, P.m
    a, b = state.a, state.b
    w = mu * (p - 1.0) / 2.0
    a_star = p * (a - mu / 2.0) + 2.0 + mu / 2.0
    b_star = p * b + m * (p - 1.0)
    # C^p / C' with C' = (C/2)^p / (2 (p a + 2)^2)
    const_ratio = 2.0 ** (p + 1.0) * (p * a + 2.0) ** 2

    ratios = []
    for t, r in samples:
        if not t > 1:
            raise ValueError(f"sample t must be > 1, got {t}")
        if not in_sigma(t, r, cfg):
            raise ValueError(f"sample (t, r) = ({t}, {r}) lies outside Sigma_delta")

        def integrand(s: float, tau: float) -> float:
            return (
                s ** (m * (1.0 - p))
                * (s + tau) ** (-p * b)
                * tau ** (p * a)
                * (1.0 + tau) ** (-w)
            )

        integral, _ = dblquad(
            integrand,
            0.0,
            t,
            lambda tau: r - t + tau,
            lambda tau: r + t - tau,
            epsabs=0.0,
            epsrel=epsrel,
        )
        ratios.append(integral / 8.0 * const_ratio * (r + t) ** b_star / t**a_star)

    worst = min(ratios)
    return IterationStepReport(
        samples=tuple(samples),
        ratios=tuple(ratios),
        worst_ratio=worst,
        slack=slack,
        passed=worst >= 1.0 - slack,
    )

"""Critical-exponent algebra and region classification.

The model problem is the wave equation with scale-invariant lower-order
terms,

    v_tt - Lap(v) + mu/(1+t) v_t + nu/(1+t)^2 v = |v|^p,
    v(0, x) = 0,   v_t(0, x) = eps * g(|x|),

with radial data bounded below by M (1+r)^(-(kbar+1)).  Two families of
critical powers organize the (kbar, p) plane:

* the heat-type threshold  p_F(h) = 1 + 2/h  evaluated at the shifted
  decay h = kbar + mu/2: below it, slowly decaying data force finite-time
  blow-up;
* the wave-type threshold  p_S(d), the positive root of
  (d-1) p^2 - (d+1) p - 2 = 0, evaluated in the shifted dimension
  d = n + mu: above it (and above the Fujita curve) the known
  global-existence results apply.

The two curves p = p_F(kbar + mu/2) and p = (2 kbar + mu + 2)/(n + mu - 1)
meet at (kbar0, p_S(n + mu)); `kbar_zero` computes that abscissa.
`classify` turns one parameter point into a verdict, `atlas` samples a
whole rectangle and carries the exact boundary data needed to draw the
region diagram.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

import numpy as np

__all__ = [
    "UncoveredCaseError",
    "HypothesisError",
    "ModelParams",
    "Verdict",
    "RegionVerdict",
    "AtlasResult",
    "fujita",
    "strauss",
    "kbar_zero",
    "mu_max",
    "p_bar",
    "admissible_range",
    "lifespan_exponent",
    "classify",
    "atlas",
]


class UncoveredCaseError(ValueError):
    """The requested (n, mu) combination has no encoded literature case."""


class HypothesisError(ValueError):
    """A hypothesis of the blow-up result fails; the message names it."""


@dataclass(frozen=True)
class ModelParams:
    """Full parameter tuple of one problem instance.

    n     space dimension, integer >= 2
    mu    damping coefficient of mu/(1+t) v_t
    nu    mass coefficient of nu/(1+t)^2 v
    p     nonlinearity power, > 1
    kbar  data decay parameter, > -1 (data ~ M (1+r)^(-(kbar+1)))
    M     data amplitude, > 0
    eps   data size, > 0
    """

    n: int
    mu: float
    nu: float
    p: float
    kbar: float
    M: float = 1.0
    eps: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)):
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n}")
        for name in ("mu", "nu", "p", "kbar", "M", "eps"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
        if not self.p > 1:
            raise ValueError(f"p must be > 1, got {self.p}")
        if not self.kbar > -1:
            raise ValueError(f"kbar must be > -1, got {self.kbar}")
        if not self.M > 0:
            raise ValueError(f"M must be > 0, got {self.M}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")

    @property
    def m(self) -> int:
        """Half dimension floor(n/2); derived, never stored."""
        return self.n // 2


class Verdict(str, Enum):
    BLOW_UP = "BlowUpTheorem1"
    GLOBAL_EXISTENCE = "GlobalExistenceLiterature"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class RegionVerdict:
    """Classification of one (kbar, p) point.

    `lifespan_exponent` is present exactly for blow-up verdicts;
    `active_constraints` names the boundary conditions that decided the
    verdict (for Unknown: the conditions that blocked each route).
    """

    kind: Verdict
    lifespan_exponent: float | None
    active_constraints: tuple[str, ...]

    def __post_init__(self) -> None:
        if (self.kind is Verdict.BLOW_UP) != (self.lifespan_exponent is not None):
            raise ValueError("lifespan_exponent present iff verdict is blow-up")
        if self.lifespan_exponent is not None and not self.lifespan_exponent > 0:
            raise ValueError("lifespan_exponent must be positive")


def fujita(h: float) -> float:
    """Heat-type critical power p_F(h) = 1 + 2/h, for h > 0."""
    if not h > 0:
        raise ValueError(f"fujita requires h > 0, got {h}")
    return 1.0 + 2.0 / h


def strauss(d: float) -> float:
    """Wave-type critical power p_S(d): positive root of (d-1)p^2 - (d+1)p - 2.

    Defined for d > 1; strictly decreasing in d.
    """
    if not d > 1:
        raise ValueError(f"strauss requires d > 1, got {d}")
    return ((d + 1.0) + math.sqrt((d + 1.0) ** 2 + 8.0 * (d - 1.0))) / (2.0 * (d - 1.0))


def kbar_zero(n: int, mu: float) -> float:
    """Decay threshold kbar0 solving p_F(kbar0 + mu/2) = p_S(n + mu).

    Algebraically kbar0 = 2/(p_S(n+mu) - 1) - mu/2.  For kbar below this
    value there is a band of powers between the two critical curves where
    the blow-up result applies but the global-existence results do not.
    """
    if n < 2:
        raise ValueError(f"kbar_zero requires n >= 2, got {n}")
    if not n + mu > 1:
        raise ValueError(f"kbar_zero requires n + mu > 1, got {n + mu}")
    return 2.0 / (strauss(n + mu) - 1.0) - mu / 2.0


def mu_max(n: int) -> float:
    """Upper end M(n) = (n-1)/2 (1 + sqrt((n+7)/(n-1))) of the damping range
    covered by the encoded global-existence results."""
    if n < 2:
        raise ValueError(f"mu_max requires n >= 2, got {n}")
    return 0.5 * (n - 1.0) * (1.0 + math.sqrt((n + 7.0) / (n - 1.0)))


def p_bar(n: int, mu: float) -> float:
    """Upper power cap min{p_F(mu), p_F((n+mu-1)/2)} of the general-damping
    global-existence results."""
    if not mu > 0:
        raise ValueError(f"p_bar requires mu > 0, got {mu}")
    return min(fujita(mu), fujita((n + mu - 1.0) / 2.0))


# Literature case table for the admissible decay interval [k1, k2].  Each
# (n, mu) combination documented below maps to explicit k1/k2 formulas plus
# an optional upper cap on p; anything else is an uncovered case.


def _mu2_case(n: int, p: float) -> tuple[float, float, tuple[str, bool] | None]:
    """k1, k2 and p-cap for mu = 2 (no mass term).  Returns (k1, k2, cap)
    where cap = (label, satisfied) or None."""
    if n == 3:
        k1 = max((3.0 - p) / (p - 1.0), 1.0 / (p - 1.0))
        k2 = 2.0 * (p - 1.0)
        return k1, k2, None
    if n >= 5 and n % 2 == 1:
        k1 = max((3.0 - p) / (p - 1.0), (n - 1.0) / 2.0)
        k2 = min((n + 1.0) * p / 2.0 - 2.0, (n * n - 2.0 * n + 13.0) / (2.0 * (n - 3.0)))
        if n == 5:
            k2 = min(k2, 3.0)
            return k1, k2, ("p <= 2 (n = 5)", p <= 2.0)
        cap = (n + 1.0) / (n - 3.0)
        return k1, k2, (f"p <= (n+1)/(n-3) = {cap:.6g}", p <= cap)
    if n >= 4 and n % 2 == 0:
        k1 = max((3.0 - p) / (p - 1.0), (n - 1.0) / 2.0)
        k2 = min((n + 1.0) * p / 2.0 - 2.0, n - 1.0)
        cap = p_bar(n, 2.0)
        return k1, k2, (f"p < p_bar(n, 2) = {cap:.6g}", p < cap)
    raise UncoveredCaseError(f"no encoded admissible range for n = {n}, mu = 2")


def _general_mu_case(n: int, p: float, mu: float) -> tuple[float, float, tuple[str, bool]]:
    """k1, k2 and p-cap for damping mu in [2, M(n)] with the matching mass
    nu = (mu/2)(mu/2 - 1)."""
    if not 2.0 <= mu <= mu_max(n):
        raise UncoveredCaseError(
            f"mu = {mu} outside the encoded damping range [2, {mu_max(n):.6g}] for n = {n}"
        )
    k2 = min(n - 1.0, (n + mu - 1.0) * p / 2.0 - (mu + 2.0) / 2.0)
    cap_val = p_bar(n, mu)
    cap = (f"p < p_bar(n, mu) = {cap_val:.6g}", p < cap_val)
    if n % 2 == 0:
        if n < 4:
            raise UncoveredCaseError(f"no encoded admissible range for even n = {n}")
        k1 = max((n - 1.0) / 2.0, 2.0 / (p - 1.0) - mu / 2.0)
        return k1, k2, cap
    if n == 3:
        k1 = max(1.0, 2.0 / (p - 1.0) - mu / 2.0, 1.0 / (p - 1.0))
        return k1, k2, cap
    # odd n >= 5: the slow-decay guard 1/(p-1) joins only for large damping
    if mu <= n - 1.0:
        k1 = max((n - 1.0) / 2.0, 2.0 / (p - 1.0) - mu / 2.0)
    else:
        k1 = max((n - 1.0) / 2.0, 2.0 / (p - 1.0) - mu / 2.0, 1.0 / (p - 1.0))
    return k1, k2, cap


def _case_with_cap(n: int, p: float, mu: float):
    if mu == 2.0:
        return _mu2_case(n, p)
    return _general_mu_case(n, p, mu)


def admissible_range(n: int, p: float, mu: float) -> tuple[float, float]:
    """Decay interval [k1, k2] of the encoded global-existence results.

    The case table is closed: combinations of (n, mu) that are not
    documented raise UncoveredCaseError rather than interpolating.
    """
    if n < 2:
        raise ValueError(f"admissible_range requires n >= 2, got {n}")
    if not p > 1:
        raise ValueError(f"admissible_range requires p > 1, got {p}")
    k1, k2, _ = _case_with_cap(n, p, mu)
    return k1, k2


def lifespan_exponent(params: ModelParams) -> float:
    """Exponent alpha of the lifespan bound T(eps) <= C eps^(-alpha),

        alpha = 2 (p-1) / (4 - (mu + 2 kbar)(p-1)),

    valid under the blow-up hypotheses; raises HypothesisError naming the
    first failed hypothesis otherwise.  Identical to
    1 / (2/(p-1) - mu/2 - kbar).
    """
    h = params.kbar + params.mu / 2.0
    if not h > 0:
        raise HypothesisError(f"kbar + mu/2 > 0 fails: {h}")
    nu_crit = 0.25 * params.mu * (params.mu - 2.0)
    if not nu_crit >= params.nu:
        raise HypothesisError(f"(mu/2)(mu/2 - 1) >= nu fails: {nu_crit} < {params.nu}")
    if not params.p < fujita(h):
        raise HypothesisError(f"p < p_F(kbar + mu/2) fails: {params.p} >= {fujita(h)}")
    return 2.0 * (params.p - 1.0) / (4.0 - (params.mu + 2.0 * params.kbar) * (params.p - 1.0))


_T1_CONSTRAINTS = (
    "kbar + mu/2 > 0",
    "nu <= (mu/2)(mu/2 - 1)",
    "p < p_F(kbar + mu/2)",
)


def classify(params: ModelParams) -> RegionVerdict:
    """Classify a parameter point as blow-up, known global existence, or
    unknown.

    Blow-up requires the three strict hypotheses named in the verdict.
    Global existence requires the exact mass matching
    nu = (mu/2)(mu/2 - 1) >= 0, damping in [2, M(n)], p strictly above both
    critical powers and below the case's cap, and a decay parameter
    reaching the admissible interval (kbar above k2 is downgraded to k2,
    since faster decay satisfies the slower-decay hypothesis).  Points on
    a boundary curve are Unknown: nothing is proved there.
    """
    p, mu, nu, kbar, n = params.p, params.mu, params.nu, params.kbar, params.n
    h = kbar + mu / 2.0
    nu_crit = 0.25 * mu * (mu - 2.0)

    t1_failed = []
    if not h > 0:
        t1_failed.append(_T1_CONSTRAINTS[0])
    if not nu_crit >= nu:
        t1_failed.append(_T1_CONSTRAINTS[1])
    if not t1_failed and not p < fujita(h):
        t1_failed.append(_T1_CONSTRAINTS[2])
    if not t1_failed:
        return RegionVerdict(
            kind=Verdict.BLOW_UP,
            lifespan_exponent=lifespan_exponent(params),
            active_constraints=_T1_CONSTRAINTS,
        )

    ge_failed = []
    ge_active = []
    if nu == nu_crit and nu_crit >= 0.0:
        ge_active.append("nu = (mu/2)(mu/2 - 1) >= 0")
    else:
        ge_failed.append("nu = (mu/2)(mu/2 - 1) >= 0")
    if 2.0 <= mu <= mu_max(n):
        ge_active.append("2 <= mu <= M(n)")
    else:
        ge_failed.append("2 <= mu <= M(n)")
    if not ge_failed:
        try:
            k1, k2, cap = _case_with_cap(n, p, mu)
        except UncoveredCaseError:
            ge_failed.append("documented (n, mu) case")
        else:
            k_eff = min(kbar, k2)
            if kbar > k2:
                ge_active.append("kbar > k2: reduced to k2")
            if k_eff >= k1:
                ge_active.append("kbar >= k1(n, p, mu)")
            else:
                ge_failed.append("kbar >= k1(n, p, mu)")
            if p > strauss(n + mu):
                ge_active.append("p > p_S(n + mu)")
            else:
                ge_failed.append("p > p_S(n + mu)")
            if h > 0 and p > fujita(h):
                ge_active.append("p > p_F(kbar + mu/2)")
            else:
                ge_failed.append("p > p_F(kbar + mu/2)")
            if cap is not None:
                label, ok = cap
                (ge_active if ok else ge_failed).append(label)
    if not ge_failed:
        return RegionVerdict(
            kind=Verdict.GLOBAL_EXISTENCE,
            lifespan_exponent=None,
            active_constraints=tuple(ge_active),
        )

    blocked = tuple(f"no blow-up: {c}" for c in t1_failed) + tuple(
        f"no global existence: {c}" for c in ge_failed
    )
    return RegionVerdict(kind=Verdict.UNKNOWN, lifespan_exponent=None, active_constraints=blocked)


GridLike = Union[Sequence[float], tuple[float, float, int], np.ndarray]


def _as_grid(spec: GridLike, name: str) -> np.ndarray:
    """Accept either an explicit value sequence or a (lo, hi, count) range."""
    if isinstance(spec, tuple) and len(spec) == 3 and isinstance(spec[2], (int, np.integer)):
        lo, hi, count = spec
        if count <= 0:
            raise ValueError(f"{name}: empty grid")
        values = np.linspace(float(lo), float(hi), int(count))
    else:
        values = np.asarray(spec, dtype=float)
    if values.size == 0:
        raise ValueError(f"{name}: empty grid")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name}: grid values must be finite")
    return values


@dataclass(frozen=True)
class AtlasResult:
    """Verdict grid over a (kbar, p) rectangle plus exact boundary data.

    verdicts[i, j] classifies (kbar_values[i], p_values[j]); alphas holds
    the lifespan exponent at blow-up nodes and NaN elsewhere.  The curve
    arrays sample p = p_F(kbar + mu/2) and the straight existence boundary
    p = (2 kbar + mu + 2)/(n + mu - 1); (kbar0, p_strauss) is their exact
    intersection.
    """

    n: int
    mu: float
    nu: float
    kbar_values: np.ndarray
    p_values: np.ndarray
    verdicts: np.ndarray
    alphas: np.ndarray
    kbar0: float
    p_strauss: float
    fujita_curve: np.ndarray
    existence_line: np.ndarray

    def verdict_counts(self) -> dict[str, int]:
        flat = self.verdicts.ravel()
        return {v.value: int(np.sum(flat == v.value)) for v in Verdict}

    def to_csv(self, target) -> None:
        """Write rows (kbar, p, verdict, alpha-or-blank); kbar varies slowest."""
        own = isinstance(target, (str, bytes)) or hasattr(target, "__fspath__")
        fh = open(target, "w", encoding="utf-8", newline="") if own else target
        try:
            fh.write("kbar,p,verdict,alpha\n")
            for i, k in enumerate(self.kbar_values):
                for j, p in enumerate(self.p_values):
                    a = self.alphas[i, j]
                    alpha_field = f"{a:.12g}" if math.isfinite(a) else ""
                    fh.write(f"{k:.12g},{p:.12g},{self.verdicts[i, j]},{alpha_field}\n")
        finally:
            if own:
                fh.close()

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def atlas(
    n: int,
    mu: float,
    nu: float,
    k_grid: GridLike,
    p_grid: GridLike,
    M: float = 1.0,
    eps: float = 1.0,
    curve_samples: int = 512,
) -> AtlasResult:
    """Classify every node of a (kbar, p) grid and attach boundary curves.

    Grid nodes must satisfy kbar > -1 and p > 1 (parameter domain).  M and
    eps never affect verdicts; they are accepted only to complete the
    parameter tuples.
    """
    kbar_values = _as_grid(k_grid, "k_grid")
    p_values = _as_grid(p_grid, "p_grid")
    if not np.all(kbar_values > -1):
        raise ValueError("k_grid: all kbar values must be > -1")
    if not np.all(p_values > 1):
        raise ValueError("p_grid: all p values must be > 1")
    if curve_samples < 2:
        raise ValueError("curve_samples must be >= 2")

    verdicts = np.empty((kbar_values.size, p_values.size), dtype=object)
    alphas = np.full((kbar_values.size, p_values.size), math.nan)
    for i, k in enumerate(kbar_values):
        for j, p in enumerate(p_values):
            v = classify(ModelParams(n=n, mu=mu, nu=nu, p=float(p), kbar=float(k), M=M, eps=eps))
            verdicts[i, j] = v.kind.value
            if v.lifespan_exponent is not None:
                alphas[i, j] = v.lifespan_exponent

    kbar0 = kbar_zero(n, mu)
    p_strauss = strauss(n + mu)

    # Fujita curve only exists where kbar + mu/2 > 0.
    k_lo = float(kbar_values.min())
    k_hi = float(kbar_values.max())
    curve_lo = max(k_lo, -mu / 2.0 + 1e-9 * max(1.0, abs(mu / 2.0)))
    if curve_lo < k_hi:
        ks = np.linspace(curve_lo, k_hi, curve_samples)
        fujita_curve = np.column_stack([ks, 1.0 + 2.0 / (ks + mu / 2.0)])
    else:
        fujita_curve = np.empty((0, 2))
    ks = np.linspace(k_lo, k_hi, curve_samples)
    existence_line = np.column_stack([ks, (2.0 * ks + mu + 2.0) / (n + mu - 1.0)])

    return AtlasResult(
        n=n,
        mu=mu,
        nu=nu,
        kbar_values=kbar_values,
        p_values=p_values,
        verdicts=verdicts,
        alphas=alphas,
        kbar0=kbar0,
        p_strauss=p_strauss,
        fujita_curve=fujita_curve,
        existence_line=existence_line,
    )

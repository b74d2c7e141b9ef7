"""Transform families psi and the wrapping-constant solver.

The wrapping transform is an odd, redescending function: the identity on
[-b, b], a scaled tanh descent on [b, c], and exactly zero beyond c.
Intermediate values are folded inward so they still count, while far
outliers are erased entirely. Its four derived constants (A, B, k, q1, q2)
are coupled through three conditions,

    A  = integral of psi^2 against the standard normal on [-c, c],
    B  = integral of psi'  against the standard normal on [-c, c],
    b  = q1 * tanh(q2 * (c - b))       (continuity at the corner z = b),

with q1 = sqrt(A * (k - 1)) and q2 = (B / 2) * sqrt((k - 1) / A).
``solve_wrapping_constants`` resolves them for any 0 < b < c.

Rank-based families are carried in the same PsiSpec container. For data
they act through ``rank_score`` on rescaled ranks; for population-level
computations ``eval_psi`` evaluates their limiting score z -> h(Phi(z)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate
from scipy.optimize import brentq
from scipy.stats import norm

from ._quad import norm_pdf
from .errors import ConfigurationError, InputError, SolverError

PSI_FAMILIES = (
    "identity",
    "sign",
    "huber",
    "sigmoid",
    "wrapping",
)
RANK_FAMILIES = (
    "rank-spearman",
    "rank-quadrant",
    "rank-normal-scores",
    "rank-truncated-ns",
)
ALL_FAMILIES = PSI_FAMILIES + RANK_FAMILIES


@dataclass(frozen=True)
class PsiSpec:
    """A transform family together with its tuning and derived constants.

    Only the wrapping family carries derived constants; they are filled in
    by :func:`solve_wrapping_constants` and must be present before the
    transform can be evaluated.
    """

    family: str
    b: float | None = None          # corner point, z-units (huber/wrapping)
    c: float | None = None          # rejection point, z-units (wrapping)
    alpha: float | None = None      # truncation fraction (truncated NS)
    q1: float | None = None
    q2: float | None = None
    A: float | None = None
    B: float | None = None
    k: float | None = None

    def __post_init__(self):
        if self.family not in ALL_FAMILIES:
            raise InputError(f"unknown transform family {self.family!r}")
        if self.family in ("huber", "wrapping"):
            if self.b is None or self.b <= 0:
                raise InputError(f"{self.family} requires a corner point b > 0")
        if self.family == "wrapping":
            if self.c is None or not self.b < self.c < math.inf:
                raise InputError("wrapping requires b < c < inf")
        if self.family == "rank-truncated-ns":
            if self.alpha is None or not 0.0 < self.alpha < 0.5:
                raise InputError("truncated normal scores require alpha in (0, 0.5)")

    @property
    def solved(self) -> bool:
        return self.family != "wrapping" or None not in (
            self.q1, self.q2, self.A, self.B, self.k)

    @property
    def label(self) -> str:
        if self.family == "wrapping":
            return f"wrapping(b={self.b:g}, c={self.c:g})"
        if self.family == "huber":
            return f"huber(b={self.b:g})"
        if self.family == "rank-truncated-ns":
            return f"truncated-normal-scores(alpha={self.alpha:g})"
        return self.family


# ---------------------------------------------------------------------------
# factories

def identity() -> PsiSpec:
    return PsiSpec("identity")


def sign() -> PsiSpec:
    return PsiSpec("sign")


def huber(b: float = 1.5) -> PsiSpec:
    return PsiSpec("huber", b=b)


def sigmoid() -> PsiSpec:
    return PsiSpec("sigmoid")


def wrapping(b: float = 1.5, c: float = 4.0, tol: float = 1e-10) -> PsiSpec:
    """Wrapping transform with its derived constants already solved."""
    return solve_wrapping_constants(b, c, tol)


def rank_spearman() -> PsiSpec:
    return PsiSpec("rank-spearman")


def rank_quadrant() -> PsiSpec:
    return PsiSpec("rank-quadrant")


def rank_normal_scores() -> PsiSpec:
    return PsiSpec("rank-normal-scores")


def rank_truncated_ns(alpha: float) -> PsiSpec:
    return PsiSpec("rank-truncated-ns", alpha=alpha)


# ---------------------------------------------------------------------------
# evaluation

def _require_solved(spec: PsiSpec):
    if not spec.solved:
        raise ConfigurationError(
            "wrapping constants not solved; build the spec via "
            "solve_wrapping_constants() or wrapping()")


def _check_finite(z: np.ndarray):
    if not np.all(np.isfinite(z)):
        raise InputError("psi evaluation requires finite z values")


def eval_psi(spec: PsiSpec, z):
    """Evaluate psi(z); odd in z for every family.

    Rank families are evaluated through their population score
    h(Phi(z)), which is what all asymptotic computations use.
    """
    _require_solved(spec)
    z = np.asarray(z, dtype=float)
    _check_finite(z)
    fam = spec.family
    if fam == "identity":
        out = z.copy()
    elif fam == "sign":
        out = np.sign(z)
    elif fam == "huber":
        out = np.clip(z, -spec.b, spec.b)
    elif fam == "sigmoid":
        out = np.tanh(z)
    elif fam == "wrapping":
        a = np.abs(z)
        out = np.where(a <= spec.b, z, 0.0)
        mid = (a > spec.b) & (a < spec.c)
        out[mid] = spec.q1 * np.tanh(spec.q2 * (spec.c - a[mid])) * np.sign(z[mid])
    elif fam == "rank-spearman":
        out = norm.cdf(z) - 0.5
    elif fam == "rank-quadrant":
        out = np.sign(z)
    elif fam == "rank-normal-scores":
        out = z.copy()
    else:  # rank-truncated-ns
        bound = norm.ppf(1.0 - spec.alpha)
        out = np.clip(z, -bound, bound)
    return out if out.ndim else float(out)


def eval_weight(spec: PsiSpec, z):
    """Multiplicative weight w(z) = psi(z)/z, with w == 1 on the identity
    core [-b, b] and w(0) = 1."""
    if spec.family in RANK_FAMILIES:
        raise InputError("weights are only defined for psi-transform families")
    z = np.asarray(z, dtype=float)
    _check_finite(z)
    b = spec.b if spec.family in ("huber", "wrapping") else 0.0
    psi = np.asarray(eval_psi(spec, z))
    out = np.ones_like(z)
    outside = np.abs(z) > b
    out[outside] = psi[outside] / z[outside]
    out[z == 0.0] = 1.0
    return out if out.ndim else float(out)


def eval_psi_derivative(spec: PsiSpec, z):
    """Analytic derivative of psi.

    At non-differentiable corner points the one-sided derivative from the
    inner region is returned; corners have measure zero in every
    expectation this feeds.
    """
    _require_solved(spec)
    z = np.asarray(z, dtype=float)
    _check_finite(z)
    fam = spec.family
    if fam in ("identity", "rank-normal-scores"):
        out = np.ones_like(z)
    elif fam in ("sign", "rank-quadrant"):
        out = np.zeros_like(z)
    elif fam == "huber":
        out = np.where(np.abs(z) <= spec.b, 1.0, 0.0)
    elif fam == "sigmoid":
        out = 1.0 - np.tanh(z) ** 2
    elif fam == "wrapping":
        a = np.abs(z)
        out = np.where(a <= spec.b, 1.0, 0.0)
        mid = (a > spec.b) & (a <= spec.c)
        t = np.tanh(spec.q2 * (spec.c - a[mid]))
        out[mid] = -spec.q1 * spec.q2 * (1.0 - t * t)
    elif fam == "rank-spearman":
        out = norm_pdf(z)
    else:  # rank-truncated-ns
        bound = norm.ppf(1.0 - spec.alpha)
        out = np.where(np.abs(z) <= bound, 1.0, 0.0)
    return out if out.ndim else float(out)


def psi_sup(spec: PsiSpec) -> float:
    """sup over z of |psi(z)| (the constant M in robustness formulas)."""
    fam = spec.family
    if fam in ("identity", "rank-normal-scores"):
        return math.inf
    if fam in ("sign", "sigmoid", "rank-quadrant"):
        return 1.0
    if fam in ("huber", "wrapping"):
        return float(spec.b)
    if fam == "rank-spearman":
        return 0.5
    return float(norm.ppf(1.0 - spec.alpha))  # rank-truncated-ns


def breakpoints(spec: PsiSpec) -> tuple[float, ...]:
    """z-values where psi or psi' has a corner; quadrature splits here."""
    fam = spec.family
    if fam == "huber":
        return (-spec.b, spec.b)
    if fam == "wrapping":
        return (-spec.c, -spec.b, spec.b, spec.c)
    if fam in ("sign", "rank-quadrant"):
        return (0.0,)
    if fam == "rank-truncated-ns":
        bound = float(norm.ppf(1.0 - spec.alpha))
        return (-bound, bound)
    return ()


def rank_score(family: str, u):
    """Score applied to a rescaled rank u in (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any((u <= 0.0) | (u >= 1.0)):
        raise InputError("rescaled ranks must lie strictly inside (0, 1)")
    if isinstance(family, PsiSpec):
        family, spec = family.family, family
    else:
        spec = None
    if family == "rank-spearman":
        out = u.copy()
    elif family == "rank-quadrant":
        out = np.sign(u - 0.5)
    elif family == "rank-normal-scores":
        out = norm.ppf(u)
    elif family == "rank-truncated-ns":
        if spec is None or spec.alpha is None:
            raise InputError("truncated normal scores need an alpha")
        out = norm.ppf(np.clip(u, spec.alpha, 1.0 - spec.alpha))
    else:
        raise InputError(f"not a rank family: {family!r}")
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# wrapping-constant solver

def _q1q2(A: float, B: float, k: float) -> tuple[float, float]:
    q1 = math.sqrt(A * (k - 1.0))
    q2 = 0.5 * B * math.sqrt((k - 1.0) / A)
    return q1, q2


def _moments_for(b: float, c: float, q1: float, q2: float) -> tuple[float, float]:
    """(integral of psi^2, integral of psi') against phi over [-c, c]."""

    def psi_sq(z):
        return (q1 * np.tanh(q2 * (c - z))) ** 2 * norm_pdf(z)

    def psi_prime(z):
        t = np.tanh(q2 * (c - z))
        return -q1 * q2 * (1.0 - t * t) * norm_pdf(z)

    core_sq, _ = integrate.quad(lambda z: z * z * norm_pdf(z), 0.0, b,
                                epsabs=1e-13, epsrel=1e-13)
    tail_sq, _ = integrate.quad(psi_sq, b, c, epsabs=1e-13, epsrel=1e-13)
    tail_pr, _ = integrate.quad(psi_prime, b, c, epsabs=1e-13, epsrel=1e-13)
    A = 2.0 * (core_sq + tail_sq)
    B = 2.0 * (norm.cdf(b) - 0.5 + tail_pr)
    return A, B


def _self_consistent_moments(b: float, c: float, k: float,
                             A0: float, B0: float) -> tuple[float, float]:
    """Fixed-point iteration on (A, B) for a candidate k."""
    A, B = A0, B0
    for _ in range(300):
        q1, q2 = _q1q2(A, B, k)
        A_new, B_new = _moments_for(b, c, q1, q2)
        if abs(A_new - A) < 1e-14 and abs(B_new - B) < 1e-14:
            return A_new, B_new
        A, B = A_new, B_new
    raise SolverError(
        f"moment fixed point did not converge for k={k:.6g}",
        residual=abs(A_new - A))


def solve_wrapping_constants(b: float, c: float, tol: float = 1e-10) -> PsiSpec:
    """Solve the coupled constants (A, B, k, q1, q2) of the wrapping
    transform for corner point b and rejection point c.

    Strategy: an outer bracketed root-find on k, where each evaluation
    makes (A, B) self-consistent with their defining integrals by
    fixed-point iteration; the outer residual is the corner-continuity
    defect q1*tanh(q2*(c - b)) - b.
    """
    if not 0.0 < b < c:
        raise InputError(f"need 0 < b < c, got b={b}, c={c}")
    if tol <= 0.0:
        raise InputError("tol must be positive")

    # Huber moments at the same corner are a good starting point.
    A0 = float(normal_moment_huber_sq(b))
    B0 = 2.0 * float(norm.cdf(b)) - 1.0
    state = {"A": A0, "B": B0}

    def residual(k: float) -> float:
        A, B = _self_consistent_moments(b, c, k, state["A"], state["B"])
        state["A"], state["B"] = A, B  # warm start for the next k
        q1, q2 = _q1q2(A, B, k)
        return q1 * math.tanh(q2 * (c - b)) - b

    k_lo, k_hi = 1.0 + 1e-6, 2.0
    r_lo = residual(k_lo)
    r_hi = residual(k_hi)
    while r_lo * r_hi > 0.0 and k_hi < 100.0:
        k_lo, r_lo = k_hi, r_hi
        k_hi = min(k_hi * 2.0, 100.0)
        r_hi = residual(k_hi)
    if r_lo * r_hi > 0.0:
        raise SolverError(
            f"no continuity root for k in (1, 100] with b={b}, c={c}",
            residual=r_hi)

    k = brentq(residual, k_lo, k_hi, xtol=min(tol, 1e-12), rtol=8.9e-16)
    A, B = _self_consistent_moments(b, c, k, state["A"], state["B"])
    q1, q2 = _q1q2(A, B, k)
    defect = abs(q1 * math.tanh(q2 * (c - b)) - b)
    if defect > tol:
        raise SolverError(
            f"continuity defect {defect:.3e} exceeds tol={tol:g}",
            residual=defect)
    return PsiSpec("wrapping", b=float(b), c=float(c),
                   q1=q1, q2=q2, A=A, B=B, k=k)


def normal_moment_huber_sq(b: float) -> float:
    """E[min(|Z|, b)^2] for Z ~ N(0,1), in closed form."""
    return (2.0 * norm.cdf(b) - 1.0
            - 2.0 * b * norm_pdf(b)
            + 2.0 * b * b * norm.sf(b))


# ---------------------------------------------------------------------------
# plain-text serialization (cacheable solved constants)

_DERIVED_KEYS = ("q1", "q2", "A", "B", "k")
_CONFIG_KEYS = ("family", "b", "c", "alpha") + _DERIVED_KEYS


def to_config_text(spec: PsiSpec) -> str:
    """Key-value text form; derived constants kept to 10 significant digits."""
    lines = [f"family = {spec.family}"]
    for key in ("b", "c", "alpha"):
        val = getattr(spec, key)
        if val is not None:
            lines.append(f"{key} = {val:.10g}")
    for key in _DERIVED_KEYS:
        val = getattr(spec, key)
        if val is not None:
            lines.append(f"{key} = {val:.10g}")
    return "\n".join(lines) + "\n"


def from_config_text(text: str) -> PsiSpec:
    fields: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InputError(f"malformed config line {lineno}: {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise InputError(f"unknown config key {key!r}")
        fields[key] = value if key == "family" else float(value)
    if "family" not in fields:
        raise InputError("config is missing the transform family")
    return PsiSpec(**fields)  # type: ignore[arg-type]


def refine(spec: PsiSpec, tol: float = 1e-10) -> PsiSpec:
    """Re-solve derived constants if a cached spec lacks them."""
    if spec.family == "wrapping" and not spec.solved:
        solved = solve_wrapping_constants(spec.b, spec.c, tol)
        return replace(spec, q1=solved.q1, q2=solved.q2,
                       A=solved.A, B=solved.B, k=solved.k)
    return spec

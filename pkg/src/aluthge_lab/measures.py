"""Atomic Berger measures and spherical quasinormality.

A commuting pair with moment table gamma is subnormal when some positive
measure reproduces gamma_(m,n) as its (m, n) power moments; for the
families here the measures are finitely atomic, so verification is a
finite moment comparison.  The module also houses the two-atomic
completion machinery: a one-variable weight row plus a constant C
determines a unique commuting diagram with alpha_k^2 + beta_k^2 = C
everywhere, the fixed-point class of the spherical transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diagrams import (
    DENOM_FLOOR,
    OneVarWeights,
    WeightDiagram,
    as_one_var_weights,
    moments,
    moments_1var,
    truncate,
)
from .errors import (
    DomainError,
    InfeasibleConstantError,
    InternalConsistencyError,
    WindowError,
)
from .transforms import spherical_transform

# Constant-row deviation allowed when detecting spherical quasinormality.
QUASINORMAL_TOL = 1e-12
# Fixed-point route: allowed weight deviation between W and its spherical transform.
FIXED_POINT_TOL = 1e-10


# ---------------------------------------------------------------------------
# Stampfli's two-atomic construction


@dataclass(frozen=True)
class StampfliData:
    """Two-atomic measure with prescribed first three weights sqrt(a,b,c).

    The measure rho0 delta_{s0} + rho1 delta_{s1} has moments
    gamma_j = rho0 s0^j + rho1 s1^j, and the associated weight sequence
    omega_j = sqrt(gamma_{j+1} / gamma_j) starts sqrt(a), sqrt(b), sqrt(c).
    """

    a: float
    b: float
    c: float
    phi0: float
    phi1: float
    s0: float
    s1: float
    rho0: float
    rho1: float
    weights: OneVarWeights

    def gamma(self, j: int) -> float:
        return self.rho0 * self.s0**j + self.rho1 * self.s1**j


def stampfli(a: float, b: float, c: float) -> StampfliData:
    """Atoms and masses of the two-atomic measure with moments a, ab, abc.

    phi0 = -ab(c-b)/(b-a) and phi1 = b(c-a)/(b-a) are the coefficients of
    the recursion gamma_{j+2} = phi1 gamma_{j+1} + phi0 gamma_j; the atoms
    are the roots of t^2 - phi1 t - phi0.
    """
    if not (0.0 < a < b < c):
        raise DomainError(f"require 0 < a < b < c, got ({a}, {b}, {c})")
    phi0 = -a * b * (c - b) / (b - a)
    phi1 = b * (c - a) / (b - a)
    disc = phi1 * phi1 + 4.0 * phi0
    if disc < 0.0:
        raise InternalConsistencyError(
            f"negative discriminant {disc:.3e} for ordered inputs ({a}, {b}, {c})"
        )
    root = math.sqrt(disc)
    s0 = 0.5 * (phi1 - root)
    s1 = 0.5 * (phi1 + root)
    rho0 = (s1 - a) / (s1 - s0)
    rho1 = (a - s0) / (s1 - s0)
    if not (0.0 < s0 < s1 and rho0 > 0.0 and rho1 > 0.0):
        raise InternalConsistencyError(
            f"atom data out of range for ({a}, {b}, {c}): "
            f"s0={s0:.6g}, s1={s1:.6g}, rho0={rho0:.6g}, rho1={rho1:.6g}"
        )

    def omega(j: int) -> float:
        g0 = rho0 * s0**j + rho1 * s1**j
        g1 = rho0 * s0 ** (j + 1) + rho1 * s1 ** (j + 1)
        return math.sqrt(g1 / g0)

    weights = OneVarWeights(fn=omega, tag=f"stampfli:{a!r},{b!r},{c!r}")
    return StampfliData(
        a=float(a), b=float(b), c=float(c),
        phi0=phi0, phi1=phi1, s0=s0, s1=s1, rho0=rho0, rho1=rho1,
        weights=weights,
    )


# ---------------------------------------------------------------------------
# quasinormal completion from the zeroth row


def _two_atom_completion(om: OneVarWeights, C: float) -> WeightDiagram:
    """Completion of a two-atom row, evaluated through its moment field.

    The constant-sum condition propagates gamma(m, n+1) = C gamma(m, n)
    - gamma(m+1, n), whose solution for a row with atoms s_i and masses
    rho_i is gamma(m, n) = sum_i rho_i s_i^m (C - s_i)^n.  Every term is
    positive, so each weight is a well-conditioned ratio at any lattice
    depth, where the row-by-row recursion would compound relative error
    through its C / beta^2 factors.
    """
    a, b, c = (float(s) for s in om.tag.split(":", 1)[1].split(","))
    d = stampfli(a, b, c)
    if C - d.s1 <= 0.0:
        raise InfeasibleConstantError(
            f"constant C = {C} is not above the top atom {d.s1:.6g}"
        )
    t0, t1 = C - d.s0, C - d.s1

    def gamma(m: int, n: int) -> float:
        return d.rho0 * d.s0**m * t0**n + d.rho1 * d.s1**m * t1**n

    return WeightDiagram(
        kind="quasinormal-completion",
        params={"omega": om, "constant": C},
        _alpha=lambda k1, k2: math.sqrt(gamma(k1 + 1, k2) / gamma(k1, k2)),
        _beta=lambda k1, k2: math.sqrt(gamma(k1, k2 + 1) / gamma(k1, k2)),
    )


def quasinormal_completion(W0, C: float) -> WeightDiagram:
    """The unique commuting diagram with row zero W0 and alpha^2 + beta^2 = C.

    beta is forced by the constant, beta_k = sqrt(C - alpha_k^2), and
    commutativity then forces alpha_{k+e2} = alpha_k beta_{k+e1} / beta_k,
    so the whole diagram propagates upward row by row from W0.  Values are
    memoized and do not depend on any evaluation window.  A lattice point
    where C - alpha_k^2 <= 0 raises InfeasibleConstantError when reached.

    Two-atom rows bypass the recursion for the closed moment-field form,
    which stays accurate at lattice depths where forward propagation of
    the quotients would lose digits.  Finite rows are safe under the
    recursion: past their flat tail the propagated quotients are exactly
    1, so error stops accumulating with the stored prefix.
    """
    om = as_one_var_weights(W0)
    C = float(C)
    if not (math.isfinite(C) and C > 0.0):
        raise InfeasibleConstantError(f"constant must be positive, got {C}")
    if om.tag.startswith("stampfli:"):
        return _two_atom_completion(om, C)
    cache: dict = {}

    def alpha(k1: int, k2: int) -> float:
        key = (k1, k2)
        hit = cache.get(key)
        if hit is not None:
            return hit
        if k2 == 0:
            val = om(k1)
        else:
            below = alpha(k1, k2 - 1)
            right = alpha(k1 + 1, k2 - 1)
            val = below * beta_of(right) / beta_of(below)
        cache[key] = val
        return val

    def beta_of(a: float) -> float:
        d = C - a * a
        if d <= 0.0:
            raise InfeasibleConstantError(
                f"constant C = {C} is not above alpha^2 = {a * a:.6g}"
            )
        return math.sqrt(d)

    return WeightDiagram(
        kind="quasinormal-completion",
        params={"omega": om, "constant": C},
        _alpha=alpha,
        _beta=lambda k1, k2: beta_of(alpha(k1, k2)),
    )


# ---------------------------------------------------------------------------
# detection


def is_spherically_quasinormal(
    W: WeightDiagram, window: int, tol: float = QUASINORMAL_TOL
):
    """(flag, C or None): whether alpha_k^2 + beta_k^2 is constant on the window.

    Two independent routes run on every call: the constant-row scan and
    the fixed-point property of the spherical transform (the transform
    leaves the weights unchanged exactly when the row is constant).  A
    decisive disagreement raises InternalConsistencyError; boundary-thin
    cases resolve by the constant-row scan.
    """
    A, B = W.weight_arrays(window + 1, window + 1)
    S = A**2 + B**2
    C = float(S[0, 0])
    dev_c = float(np.max(np.abs(S - C)))
    cut_c = tol * max(1.0, C)
    flag = dev_c <= cut_c

    sp = spherical_transform(W, window=window)
    A2, B2 = sp.weight_arrays(window + 1, window + 1)
    dev_f = float(max(np.max(np.abs(A2 - A)), np.max(np.abs(B2 - B))))
    cut_f = FIXED_POINT_TOL * max(1.0, math.sqrt(C))
    if flag != (dev_f <= cut_f):
        if (flag and dev_f > 1e3 * cut_f) or (not flag and dev_c > 1e3 * cut_c and dev_f <= cut_f):
            raise InternalConsistencyError(
                "quasinormality routes disagree: constant-row deviation "
                f"{dev_c:.3e}, fixed-point deviation {dev_f:.3e}"
            )
    return (True, C) if flag else (False, None)


def constant_interior_p2(W: WeightDiagram, N: int, tol: float = QUASINORMAL_TOL):
    """(flag, C or None) from the diagonal of T1*T1 + T2*T2 on a truncation.

    The compressed diagonal equals alpha_k^2 + beta_k^2 at interior basis
    vectors (k1 < N and k2 < N), so constancy there is a third,
    operator-level route to spherical quasinormality.
    """
    if N < 1:
        raise WindowError("need N >= 1 for an interior")
    t = truncate(W, N)
    diag = np.diag(t.T1.T @ t.T1 + t.T2.T @ t.T2)
    n = N + 1
    idx = np.arange(n * n)
    vals = diag[(idx // n < N) & (idx % n < N)]
    C = float(vals[0])
    flag = bool(np.max(np.abs(vals - C)) <= tol * max(1.0, C))
    return (True, C) if flag else (False, None)


def quasinormality_routes(W: WeightDiagram, window: int, N: int, tol: float = QUASINORMAL_TOL) -> dict:
    """Raw flags from the three quasinormality detections, no reconciliation.

    constant_sum scans alpha_k^2 + beta_k^2 on the window; fixed_point
    compares the weights against their spherical transform; and
    interior_diagonal reads the compressed diagonal of T1*T1 + T2*T2.
    The three are equivalent for genuine diagrams, which the property
    suites assert by comparing these flags pairwise.
    """
    A, B = W.weight_arrays(window + 1, window + 1)
    S = A**2 + B**2
    C = float(S[0, 0])
    constant_sum = bool(np.max(np.abs(S - C)) <= tol * max(1.0, C))

    sp = spherical_transform(W, window=window)
    A2, B2 = sp.weight_arrays(window + 1, window + 1)
    dev = float(max(np.max(np.abs(A2 - A)), np.max(np.abs(B2 - B))))
    fixed_point = bool(dev <= FIXED_POINT_TOL * max(1.0, math.sqrt(C)))

    interior, _ = constant_interior_p2(W, N, tol)
    return {
        "constant_sum": constant_sum,
        "fixed_point": fixed_point,
        "interior_diagonal": interior,
        "constant": C if constant_sum else None,
    }


def is_spherical_isometry(W: WeightDiagram, window: int, tol: float = QUASINORMAL_TOL) -> bool:
    """Spherical quasinormality with constant exactly 1 (P^2 = I)."""
    flag, C = is_spherically_quasinormal(W, window, tol)
    return bool(flag and abs(C - 1.0) <= tol)


# ---------------------------------------------------------------------------
# atomic measures and Berger verification


@dataclass(frozen=True)
class AtomicMeasure2D:
    """Finitely many atoms (s, t) with masses rho, summing to 1."""

    atoms: tuple  # of (s, t, rho)

    def __post_init__(self):
        if not self.atoms:
            raise DomainError("measure needs at least one atom")
        pts = set()
        total = 0.0
        for s, t, rho in self.atoms:
            if s < 0.0 or t < 0.0:
                raise DomainError("atom coordinates must be nonnegative")
            if rho <= 0.0:
                raise DomainError("atom masses must be positive")
            pts.add((s, t))
            total += rho
        if len(pts) != len(self.atoms):
            raise DomainError("atoms must be distinct")
        if abs(total - 1.0) > 1e-9:
            raise DomainError(f"masses must sum to 1, got {total!r}")
        object.__setattr__(
            self, "atoms", tuple((float(s), float(t), float(r)) for s, t, r in self.atoms)
        )

    def moment(self, m: int, n: int) -> float:
        return float(sum(rho * s**m * t**n for s, t, rho in self.atoms))


def quasinormal2_measure(a: float, b: float, c: float) -> AtomicMeasure2D:
    """Berger measure of the completion of the Stampfli row with C = phi1.

    Atoms (s0, s1) and (s1, s0) with masses rho0, rho1: each coordinate
    sees a two-atomic marginal, and the cross pairing encodes the constant
    row sum s0 + s1 = phi1 = C.
    """
    d = stampfli(a, b, c)
    return AtomicMeasure2D(atoms=((d.s0, d.s1, d.rho0), (d.s1, d.s0, d.rho1)))


def berger_atomic_verify(W: WeightDiagram, mu: AtomicMeasure2D, maxdeg: int) -> float:
    """Max relative error between weight moments and measure moments.

    Compares gamma_(m,n) of the diagram against sum_i rho_i s_i^m t_i^n
    over all m + n <= maxdeg.  Denominators are floored, so identically
    zero rows cannot produce spurious blowups.
    """
    table = moments(W, maxdeg)
    worst = 0.0
    for m in range(maxdeg + 1):
        for n in range(maxdeg + 1 - m):
            g = table.gamma(m, n)
            mm = mu.moment(m, n)
            worst = max(worst, abs(g - mm) / max(abs(g), DENOM_FLOOR))
    return worst


# ---------------------------------------------------------------------------
# Q_T power identity


def qt_power_identity_check(W: WeightDiagram, nmax: int, N: int) -> float:
    """max_{n <= nmax} || Q^n(I) - (Q(I))^n ||_max over [0, N]^2.

    Q(X) = T1* X T1 + T2* X T2 maps diagonals to diagonals with
    (Q(diag x))_k = alpha_k^2 x_{k+e1} + beta_k^2 x_{k+e2}.  Each iterate
    consumes one lattice margin, so weights are read on a window enlarged
    by nmax and every reported value is exact for the full operators
    (no truncation boundary effects).  Zero for spherically quasinormal
    diagrams, where both sides are C^n I.
    """
    if nmax < 0:
        raise WindowError("nmax must be nonnegative")
    m = N + nmax + 1
    A, B = W.weight_arrays(m + 1, m + 1)
    A2, B2 = A**2, B**2
    cur = np.ones((m + 1, m + 1))
    first_power = None
    worst = 0.0
    for n in range(1, nmax + 1):
        shifted_up = np.vstack([cur[1:, :], np.zeros((1, m + 1))])
        shifted_right = np.hstack([cur[:, 1:], np.zeros((m + 1, 1))])
        cur = A2 * shifted_up + B2 * shifted_right
        window = cur[: N + 1, : N + 1]
        if first_power is None:
            first_power = window.copy()
            continue
        worst = max(worst, float(np.max(np.abs(window - first_power**n))))
    return worst


# ---------------------------------------------------------------------------
# Figure-2 family probe


def thm1_measure_probe(omega, y: float, maxdeg: int) -> dict:
    """Moment-level structure report for the proportional-rows family.

    The weights alpha_k = omega_{k1+k2}, beta_k = (y/a) omega_{k1+k2}
    force the factorization gamma_W(m, n) = r_n * gamma^{1var}_{m+n} with
    r_n depending only on n.  The report records the measured r_n next to
    the candidate scale conventions for a point mass at second coordinate
    t0 = sqrt(y/a), and which of them matches; it asserts nothing beyond
    the factorization structure itself.
    """
    from .diagrams import build_thm1

    om = as_one_var_weights(omega)
    a = om(0)
    W = build_thm1(om, y)
    table = moments(W, maxdeg)
    g1 = moments_1var(om, maxdeg)

    ratios = [table.gamma(0, n) / g1[n] for n in range(maxdeg + 1)]
    t0 = math.sqrt(y / a)
    # candidate conventions for how a point mass at second coordinate t0
    # scales the n-th vertical moments: t0^n (plain), t0^(2n) (squared
    # variables), and the scale the weights themselves force, (y/a)^(2n).
    predictions = {
        "t0_pow_n": [t0**n for n in range(maxdeg + 1)],
        "t0_pow_2n": [(y / a) ** n for n in range(maxdeg + 1)],
        "weight_scaling": [(y / a) ** (2 * n) for n in range(maxdeg + 1)],
    }

    def matches(pred):
        return all(
            abs(r - p) <= 1e-10 * max(abs(r), abs(p), 1.0) for r, p in zip(ratios, pred)
        )

    worst_fact = 0.0
    for m in range(maxdeg + 1):
        for n in range(maxdeg + 1 - m):
            g = table.gamma(m, n)
            pred = ratios[n] * g1[m + n]
            worst_fact = max(worst_fact, abs(g - pred) / max(abs(g), DENOM_FLOOR))

    return {
        "y": float(y),
        "a": float(a),
        "t0": t0,
        "ratio_per_degree": ratios,
        "predictions": predictions,
        "matches": {name: matches(pred) for name, pred in predictions.items()},
        "factorization_residual": worst_fact,
    }

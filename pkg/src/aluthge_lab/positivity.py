"""Hyponormality tests for shift pairs, weight-level and operator-level.

The weight-level route is the six-point test: the pair is jointly
hyponormal exactly when, for every lattice point k, the 2x2 matrix

    M(k) = [[alpha_{k+e1}^2 - alpha_k^2,   alpha_{k+e2} beta_{k+e1} - alpha_k beta_k],
            [      (same off-diagonal),     beta_{k+e2}^2 - beta_k^2             ]]

is positive semidefinite.  The operator-level route builds the block
commutator matrix ([(T^q)*, T^p])_{p,q} on a truncation and compresses it
to interior basis vectors, where its entries equal their
infinite-dimensional values; the compression of a PSD operator matrix is
PSD, so the finite verdict is a sound necessary condition at any order.

At order one the two routes are tied together by an exact decomposition:
the compressed block matrix is orthogonally similar to the direct sum of
the six-point blocks M(j) over the compression interior, rim terms
alpha(u1, M)^2 - alpha(u1-1, M)^2 and beta(M, u2)^2 - beta(M, u2-1)^2,
and wall terms alpha(0, k2)^2, beta(k1, 0)^2.  joint_hyponormal checks
that spectral identity on every call; a mismatch is a package bug and
raises InternalConsistencyError.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .diagrams import (
    MomentTable,
    OneVarWeights,
    WeightDiagram,
    as_one_var_weights,
    moments_1var,
    truncate,
)
from .errors import DomainError, InternalConsistencyError, WindowError
from .linalg import PSD_TOL, SYMMETRY_TOL, min_eig

# The order-1 spectral identity must hold to this absolute-per-scale level.
CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class PsdVerdict:
    is_psd: bool
    min_eigenvalue: float
    tol: float
    dim: int


def psd_check(M, tol: float = PSD_TOL) -> PsdVerdict:
    """PSD verdict with the scaled cutoff min eig >= -tol * max(1, ||M||)."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("psd_check expects a square matrix")
    if M.size == 0:
        return PsdVerdict(is_psd=True, min_eigenvalue=0.0, tol=tol, dim=0)
    skew = float(np.max(np.abs(M - M.T)))
    if skew > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(M)))):
        raise DomainError(f"matrix is not symmetric: max skew {skew:.3e}")
    eigs = np.linalg.eigvalsh(0.5 * (M + M.T))
    lo = float(eigs[0])
    scale = max(1.0, float(np.max(np.abs(eigs))))
    return PsdVerdict(is_psd=lo >= -tol * scale, min_eigenvalue=lo, tol=tol, dim=M.shape[0])


# ---------------------------------------------------------------------------
# six-point test


def _six_point_fields(W: WeightDiagram, N: int):
    """(p, q, r, min eig) arrays of M(k) over k in [0, N]^2."""
    A, B = W.weight_arrays(N + 2, N + 2)
    p = A[1:, :-1] ** 2 - A[:-1, :-1] ** 2
    r = B[:-1, 1:] ** 2 - B[:-1, :-1] ** 2
    q = A[:-1, 1:] * B[1:, :-1] - A[:-1, :-1] * B[:-1, :-1]
    mineigs = 0.5 * (p + r) - np.hypot(0.5 * (p - r), q)
    return p, q, r, mineigs


def six_point_matrix(W: WeightDiagram, k1: int, k2: int) -> np.ndarray:
    a0 = W.alpha(k1, k2)
    b0 = W.beta(k1, k2)
    p = W.alpha(k1 + 1, k2) ** 2 - a0**2
    r = W.beta(k1, k2 + 1) ** 2 - b0**2
    q = W.alpha(k1, k2 + 1) * W.beta(k1 + 1, k2) - a0 * b0
    return np.array([[p, q], [q, r]])


def six_point_test(W: WeightDiagram, k, tol: float = PSD_TOL):
    """M(k) and its PSD verdict for a single lattice point k = (k1, k2)."""
    M = six_point_matrix(W, k[0], k[1])
    return M, psd_check(M, tol)


# ---------------------------------------------------------------------------
# componentwise (each T_i hyponormal on its own)


def componentwise_hyponormal(W: WeightDiagram, N: int, tol: float = PSD_TOL):
    """(alpha nondecreasing along e1, beta nondecreasing along e2) on [0, N]^2.

    Runs on squared weights with the same scaled cutoff as the PSD tests,
    so a jointly hyponormal verdict always implies both flags (the
    diagonal of M(k) consists of exactly these differences).
    """
    A, B = W.weight_arrays(N + 2, N + 2)
    d1 = A[1:, :-1] ** 2 - A[:-1, :-1] ** 2
    d2 = B[:-1, 1:] ** 2 - B[:-1, :-1] ** 2
    cut = tol * max(1.0, float(max(A.max(), B.max())) ** 2)
    return bool(d1.min() >= -cut), bool(d2.min() >= -cut)


# ---------------------------------------------------------------------------
# joint hyponormality with the operator-level cross-check


@dataclass(frozen=True)
class HypoReport:
    """Collected hyponormality verdicts for one diagram and window.

    worst_witness is (lattice point, M(k)) at the most negative six-point
    eigenvalue when the joint test fails, else None.  k_hypo maps order k
    to its verdict for the orders actually computed.
    """

    componentwise: tuple
    joint: bool
    k_hypo: dict
    worst_witness: tuple | None
    joint_min_eig: float
    levels: dict


def _order1_block_min_eig(W: WeightDiagram, N: int, Mc: int) -> float:
    """Min eig of the compressed order-1 block commutator matrix.

    Built from dense truncated matrices; entries on the compression
    window equal their infinite-dimensional values.
    """
    t = truncate(W, N)
    T1, T2 = t.T1, t.T2
    C11 = T1.T @ T1 - T1 @ T1.T
    C22 = T2.T @ T2 - T2 @ T2.T
    C12 = T2.T @ T1 - T1 @ T2.T
    n = N + 1
    idx = np.arange(n * n)
    sel = (idx // n <= Mc) & (idx % n <= Mc)
    big = np.block(
        [
            [C11[np.ix_(sel, sel)], C12[np.ix_(sel, sel)]],
            [C12[np.ix_(sel, sel)].T, C22[np.ix_(sel, sel)]],
        ]
    )
    return min_eig(big)


def joint_hyponormal(W: WeightDiagram, N: int, tol: float = PSD_TOL):
    """Joint hyponormality on [0, N]^2, returned as (flag, HypoReport).

    The verdict is the six-point scan.  When N >= 4 the call also builds
    the order-1 operator block compressed to [0, N-3]^2 and asserts the
    exact spectral identity relating it to six-point, rim, and wall terms;
    disagreement beyond round-off raises InternalConsistencyError.
    """
    _, _, _, mineigs = _six_point_fields(W, N)
    A, B = W.weight_arrays(N + 2, N + 2)
    scale = max(1.0, float(max(A.max(), B.max())) ** 2)
    cut = tol * scale
    worst = float(mineigs.min())
    flat = int(np.argmin(mineigs))
    k = tuple(int(v) for v in np.unravel_index(flat, mineigs.shape))
    flag = worst >= -cut

    if N >= 4:
        Mc = N - 3
        rim_a = A[1 : Mc + 1, Mc] ** 2 - A[:Mc, Mc] ** 2
        rim_b = B[Mc, 1 : Mc + 1] ** 2 - B[Mc, :Mc] ** 2
        wall = min(float(np.min(A[0, : Mc + 1] ** 2)), float(np.min(B[: Mc + 1, 0] ** 2)))
        predicted = min(
            float(mineigs[:Mc, :Mc].min()),
            float(rim_a.min()),
            float(rim_b.min()),
            wall,
        )
        block = _order1_block_min_eig(W, N, Mc)
        if abs(block - predicted) > CROSS_CHECK_TOL * scale:
            raise InternalConsistencyError(
                "order-1 operator block disagrees with the six-point "
                f"decomposition: block min eig {block:.6e}, "
                f"predicted {predicted:.6e}"
            )

    report = HypoReport(
        componentwise=componentwise_hyponormal(W, N, tol),
        joint=flag,
        k_hypo={1: flag},
        worst_witness=None if flag else (k, six_point_matrix(W, k[0], k[1])),
        joint_min_eig=worst,
        levels={1: N},
    )
    return flag, report


# ---------------------------------------------------------------------------
# k-hyponormality


def _graded_multi_indices(k: int):
    out = []
    for g in range(1, k + 1):
        out.extend(sorted((p1, g - p1) for p1 in range(g + 1)))
    return out


def k_hyponormal_verdict(W: WeightDiagram, k: int, N: int, tol: float = PSD_TOL) -> PsdVerdict:
    """PSD verdict of the order-k block commutator matrix on a truncation.

    Blocks are [(T^q)*, T^p] for multi-indices 1 <= |p|, |q| <= k in graded
    lexicographic order, with T^p = T1^{p1} T2^{p2}.  The matrix is
    compressed to basis vectors with k1, k2 <= N - (2k+1); there the
    entries involve only weights within lattice distance 2k, so they equal
    their infinite-dimensional values and the verdict is a sound necessary
    condition for k-hyponormality.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if N < 4 * k + 2:
        raise WindowError(f"k = {k} needs truncation level N >= {4 * k + 2}, got {N}")
    t = truncate(W, N)
    pow1 = [np.eye(t.T1.shape[0])]
    pow2 = [np.eye(t.T1.shape[0])]
    for _ in range(k):
        pow1.append(t.T1 @ pow1[-1])
        pow2.append(t.T2 @ pow2[-1])
    ps = _graded_multi_indices(k)
    Tp = [pow1[p1] @ pow2[p2] for (p1, p2) in ps]

    Mc = N - (2 * k + 1)
    n = N + 1
    idx = np.arange(n * n)
    sel = (idx // n <= Mc) & (idx % n <= Mc)
    m = len(ps)
    d = int(np.count_nonzero(sel))
    big = np.empty((m * d, m * d))
    for ib in range(m):
        for jb in range(ib, m):
            C = Tp[jb].T @ Tp[ib] - Tp[ib] @ Tp[jb].T
            Cc = C[np.ix_(sel, sel)]
            big[ib * d : (ib + 1) * d, jb * d : (jb + 1) * d] = Cc
            if jb != ib:
                big[jb * d : (jb + 1) * d, ib * d : (ib + 1) * d] = Cc.T
    return psd_check(big, tol)


def k_hyponormal(W: WeightDiagram, k: int, N: int, tol: float = PSD_TOL) -> bool:
    return k_hyponormal_verdict(W, k, N, tol).is_psd


def full_hypo_report(W: WeightDiagram, N: int, kmax: int = 1, tol: float = PSD_TOL) -> HypoReport:
    """Componentwise, joint, and order-k verdicts up to kmax in one report.

    Each order k runs at level max(N, 4k+2) so no order silently degrades;
    the levels used are recorded.  A decisive hierarchy violation between
    consecutive orders (PSD margins clear on both sides, verdicts inverted)
    raises InternalConsistencyError.
    """
    flag, report = joint_hyponormal(W, N, tol)
    k_map = dict(report.k_hypo)
    levels = dict(report.levels)
    verdicts = {1: None}
    for k in range(2, kmax + 1):
        level = max(N, 4 * k + 2)
        v = k_hyponormal_verdict(W, k, level, tol)
        k_map[k] = v.is_psd
        levels[k] = level
        verdicts[k] = v
    for k in range(2, kmax + 1):
        if k_map[k] and not k_map[k - 1]:
            upper = verdicts[k]
            lower_margin = (
                report.joint_min_eig if k == 2 else verdicts[k - 1].min_eigenvalue
            )
            if upper.min_eigenvalue > 0 and lower_margin < -100 * tol:
                raise InternalConsistencyError(
                    f"hyponormality hierarchy inverted between k={k - 1} and k={k}"
                )
    return HypoReport(
        componentwise=report.componentwise,
        joint=flag,
        k_hypo=k_map,
        worst_witness=report.worst_witness,
        joint_min_eig=report.joint_min_eig,
        levels=levels,
    )


# ---------------------------------------------------------------------------
# one-variable tests


def one_var_k_hyponormal(omega, k: int, nmax: int | None = None, tol: float = PSD_TOL) -> bool:
    """Hankel characterization for a one-variable shift.

    shift(omega) is k-hyponormal iff the (k+1)x(k+1) Hankel matrices
    (gamma_{n+i+j})_{i,j} are PSD for every n >= 0; this checks
    n = 0 .. nmax.  The default window nmax = 4k + 6 matches the moment
    range visible to the 2-variable order-k test at level 4k + 4.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    om = as_one_var_weights(omega)
    if nmax is None:
        nmax = 4 * k + 6
    gam = moments_1var(om, nmax + 2 * k)
    steps = np.add.outer(np.arange(k + 1), np.arange(k + 1))
    for n in range(nmax + 1):
        if not psd_check(gam[n + steps], tol).is_psd:
            return False
    return True


def moment_matrix_psd(table: MomentTable, k: int, base: tuple = (0, 0), tol: float = PSD_TOL) -> PsdVerdict:
    """PSD verdict of the 2-variable moment matrix (gamma_{base+p+q})_{p,q}.

    Rows and columns run over the graded multi-indices |p| <= k including
    (0,0).  Needs maxdeg >= base1 + base2 + 2k.
    """
    ps = [(0, 0)] + _graded_multi_indices(k)
    M = np.array(
        [
            [table.gamma(base[0] + p1 + q1, base[1] + p2 + q2) for (q1, q2) in ps]
            for (p1, p2) in ps
        ]
    )
    return psd_check(M, tol)

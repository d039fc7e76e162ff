"""Eigenvalues, singular values and the quantities built from them.

Covers Laguerre-basis sections of half-line Hankel operators, tail bounds
from their coefficients, counting functions, Fredholm determinants, the
Airy edge curve and decay-law fits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import specfun as sf
from .catalogue import BOUNDED_ONLY, HALF_LINE, KernelCase
from .operators import DiscretizedOperator, DomainMismatch, NonIntegrable, airy_tw_kernel, tw_kernel_eval
from .quadrature import gauss_laguerre, gauss_legendre, geometric_grid


class NoConvergence(RuntimeError):
    pass


class InsufficientData(ValueError):
    pass


class DivergentProduct(ValueError):
    pass


NUMERICAL_FLOOR = 1e-13
MAX_DIM = 4096


@dataclass(frozen=True, eq=False)
class SpectralReport:
    singular_values: np.ndarray
    eigenvalues: np.ndarray | None = None
    eigenvectors: np.ndarray | None = None
    grid_id: int | None = None

    def __post_init__(self):
        s = np.asarray(self.singular_values, dtype=float)
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be non-negative and descending")
        object.__setattr__(self, "singular_values", s)

    @classmethod
    def from_values(cls, values):
        return cls(np.sort(np.abs(np.asarray(values, dtype=float)))[::-1])


# ---------------------------------------------------------------------------
# eigensolvers

def jacobi_eigh(a, tol=1e-14, max_sweeps=60):
    """Cyclic Jacobi rotations; returns ascending eigenvalues and column eigenvectors."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            order = np.argsort(np.diag(a))
            return np.diag(a)[order], v[:, order]
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * rp - s * rq, s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def symmetric_eigen(M, vectors=False, method="lapack") -> SpectralReport:
    """Eigen-decomposition of a symmetric matrix or DiscretizedOperator."""
    grid_id = None
    if isinstance(M, DiscretizedOperator):
        grid_id = id(M.grid)
        M = M.matrix
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if M.shape[0] > MAX_DIM:
        raise ValueError(f"dimension capped at {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise NoConvergence("matrix has non-finite entries")
    if np.max(np.abs(M - M.T), initial=0.0) > 1e-12 * max(np.max(np.abs(M), initial=0.0), 1e-300):
        raise ValueError("matrix must be symmetric")
    M = 0.5 * (M + M.T)
    if method == "jacobi":
        w, v = jacobi_eigh(M)
    elif method == "lapack":
        try:
            w, v = np.linalg.eigh(M) if vectors else (np.linalg.eigvalsh(M), None)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(str(exc)) from exc
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(-np.abs(w), kind="stable")
    return SpectralReport(np.abs(w)[order], w[order], v[:, order] if vectors and v is not None else None, grid_id)


def singular_values(M) -> np.ndarray:
    return symmetric_eigen(M).singular_values


def common_basis_residual(G: DiscretizedOperator, L: DiscretizedOperator, k: int):
    """For the k lowest eigenvectors v of L: ||Gv - (v'Gv) v|| / ||Gv||."""
    if not np.array_equal(G.grid.nodes, L.grid.nodes):
        raise DomainMismatch("operators live on different grids")
    if not 1 <= k <= len(L):
        raise ValueError("k must lie in [1, n]")
    _, vecs = np.linalg.eigh(L.matrix)
    out = []
    for v in vecs[:, :k].T:
        gv = G.apply(v)
        norm = np.linalg.norm(gv)
        out.append(0.0 if norm == 0 else float(np.linalg.norm(gv - (v @ gv) * v) / norm))
    return out


# ---------------------------------------------------------------------------
# Laguerre sections

def laguerre_basis(m_max, x):
    """Columns sqrt(2) e^{-x} L_m(2x), m < m_max: an orthonormal basis of L^2(0, inf)."""
    xi = 2 * np.asarray(x, dtype=float)
    out = np.empty((xi.size, m_max))
    prev, cur = np.zeros_like(xi), np.exp(-xi / 2)
    for m in range(m_max):
        out[:, m] = cur
        prev, cur = cur, ((2 * m + 1 - xi) * cur - m * prev) / (m + 1)
    return math.sqrt(2) * out


@dataclass(frozen=True, eq=False)
class LaguerreSection:
    N: int
    entries: np.ndarray           # <Gamma h_j, h_k>, 0 <= j, k < N
    gamma: np.ndarray             # int phi h_j, 0 <= j < 2N
    hankel_sequence: np.ndarray   # c_m with entries[j][k] = c_{j+k}, 0 <= m < 2N - 1
    hankel_defect: float

    def singular_values(self):
        return singular_values(self.entries)


def laguerre_section(kc: KernelCase, N: int, n_quad=256) -> LaguerreSection:
    if kc.domain != HALF_LINE:
        raise DomainMismatch("Laguerre sections need a half-line kernel")
    if kc.integrability == BOUNDED_ONLY or kc.decay is None:
        raise NonIntegrable(f"{kc.case_id} needs exponential decay for a Laguerre section")
    if not 1 <= N <= 128:
        raise ValueError("N must lie in [1, 128]")
    grid = gauss_laguerre(n_quad, rate=2.0)
    x, w = grid.nodes, grid.weights
    hw = laguerre_basis(2 * N, x) * w[:, None]
    gamma = kc.kernel(x) @ hw
    kern = kc.kernel(x[:, None] + x[None, :])
    entries = hw[:, :N].T @ kern @ hw[:, :N]
    entries = 0.5 * (entries + entries.T)
    # c_m = <Gamma h_0, h_m> for m < N, then along the last column
    seq = np.concatenate([entries[0, :], entries[1:, N - 1]])
    defect = 0.0
    for m in range(2 * N - 1):
        j = np.arange(max(0, m - N + 1), min(m, N - 1) + 1)
        diag = entries[j, m - j]
        defect = max(defect, float(np.ptp(diag)))
    return LaguerreSection(N, entries, gamma, seq, defect)


def finite_section_bound(ls, N: int) -> float:
    """Tail sum sum_{m >= N} (m + 1)|c_m| bounding the (N+1)-th singular value.

    Accepts a LaguerreSection or a plain coefficient sequence c_0, c_1, ...
    Terms past the stored coefficients are extrapolated geometrically.
    """
    c = np.abs(np.asarray(ls.hankel_sequence if isinstance(ls, LaguerreSection) else ls, dtype=float))
    if not 0 <= N < c.size:
        raise ValueError("N must be smaller than the number of coefficients")
    m = np.arange(c.size)
    total = float(np.sum((m[N:] + 1) * c[N:]))
    tail = c[-4:]
    if np.all(tail <= 1e-15 * max(c.max(), 1e-300)):
        return total
    ratios = tail[1:] / np.where(tail[:-1] > 0, tail[:-1], np.inf)
    r = float(np.max(ratios))
    if r >= 1:
        return math.inf
    # sum_{k >= 1} (M + k + 1) c_last r^k, M the last stored index
    last, big_m = c[-1], c.size - 1
    total += last * ((big_m + 1) * r / (1 - r) + r / (1 - r) ** 2)
    return total


# ---------------------------------------------------------------------------
# counting function and determinants

def counting_function(sr: SpectralReport, t: float) -> int:
    """#{j : t s_j^2 >= 1}."""
    if not t > 0:
        raise ValueError("t must be positive")
    return int(np.count_nonzero(t * sr.singular_values**2 >= 1))


def _log1p_sum(values, x):
    terms = x * np.asarray(values, dtype=float)
    if np.any(1 + terms <= 0):
        raise DivergentProduct("a factor 1 + x lambda_j is not positive")
    logs = np.log1p(terms)
    return float(np.sum(logs[np.argsort(np.abs(logs), kind="stable")]))


def log_fredholm_det(sr: SpectralReport, x: float) -> float:
    """log det(I + x Gamma^2) = sum log(1 + x s_j^2), summed in ascending magnitude."""
    return _log1p_sum(sr.singular_values**2, x)


def fredholm_det(sr: SpectralReport, x: float) -> float:
    return math.exp(log_fredholm_det(sr, x))


def log_det_via_counting(sr: SpectralReport, x: float, n_points=20000) -> float:
    """x int_0^inf n(t) / (t (x + t)) dt on a log grid, n sampled from the spectrum."""
    s = sr.singular_values[sr.singular_values > 0]
    if s.size == 0:
        return 0.0
    t_lo = 0.5 / s[0] ** 2
    t_hi = max(1e6 * (x + t_lo), 1e6 / s[-1] ** 2)
    grid = geometric_grid(n_points, t_lo, t_hi)
    t = grid.nodes
    n_t = np.count_nonzero(t[:, None] * s**2 >= 1, axis=1)   # zero below t_lo
    tail = n_t[-1] * math.log1p(x / t_hi)
    return grid.integrate(x * n_t / (t * (x + t))) + tail


def operator_log_det(M: DiscretizedOperator, x: float) -> float:
    """log det(I + x M) from the eigenvalues of M."""
    return _log1p_sum(np.linalg.eigvalsh(M.matrix), x)


# ---------------------------------------------------------------------------
# Airy edge curve, two routes

def _edge_grid(s, n):
    return gauss_legendre(n, 0.0, max(12.0, 16.0 - s))


def edge_hankel(s: float, n=120) -> float:
    """det(I - Gamma_s^2) for the kernel Ai(x + y + s) on (0, inf)."""
    grid = _edge_grid(s, n)
    x, w = grid.nodes, np.sqrt(grid.weights)
    m = w[:, None] * sf.ai(x[:, None] + x[None, :] + s) * w[None, :]
    return fredholm_det(SpectralReport.from_values(np.linalg.eigvalsh(m)), -1.0)


def edge_tracy_widom(s: float, n=120) -> float:
    """det(I - W) for the Airy kernel restricted to (s, inf)."""
    grid = _edge_grid(s, n)
    x, w = grid.nodes + s, np.sqrt(grid.weights)
    k = tw_kernel_eval(airy_tw_kernel(), x[:, None], x[None, :])
    m = w[:, None] * k * w[None, :]
    return math.exp(_log1p_sum(np.linalg.eigvalsh(0.5 * (m + m.T)), -1.0))


def edge_curve(s_values: Sequence[float], route="hankel", n=120) -> np.ndarray:
    fn = {"hankel": edge_hankel, "tracy_widom": edge_tracy_widom}[route]
    return np.array([fn(float(s), n) for s in s_values])


# ---------------------------------------------------------------------------
# decay fits

@dataclass(frozen=True)
class DecayReport:
    weighted_tails: Mapping[int, np.ndarray]
    C1: float
    kappa2: float
    exponent: float
    model_residual: float
    fit_indices: np.ndarray = field(repr=False)

    def fitted(self, j):
        return self.C1 * np.exp(-self.kappa2 * np.asarray(j, dtype=float) ** self.exponent)


def decay_fit(sr, exponent=1 / 3, floor=NUMERICAL_FLOOR, skip=3, min_points=8) -> DecayReport:
    """Fit log s_j = log C1 - kappa2 j^exponent over j > skip with s_j above the floor.

    Indices j start at 1.  Weighted tails j^p s_j are returned for p = 1..5.
    """
    s = sr.singular_values if isinstance(sr, SpectralReport) else np.asarray(sr, dtype=float)
    j = np.arange(1, s.size + 1, dtype=float)
    keep = (j > skip) & (s > floor)
    if np.count_nonzero(keep) < min_points:
        raise InsufficientData(f"need {min_points} singular values above {floor:g} past index {skip}")
    tails = {p: j**p * s for p in range(1, 6)}
    jj, ls = j[keep], np.log(s[keep])
    design = np.column_stack([np.ones_like(jj), -jj**exponent])
    (log_c1, kappa), *_ = np.linalg.lstsq(design, ls, rcond=None)
    rms = float(np.sqrt(np.mean((design @ [log_c1, kappa] - ls) ** 2)))
    return DecayReport(tails, float(math.exp(log_c1)), float(kappa), exponent, rms, jj.astype(int))

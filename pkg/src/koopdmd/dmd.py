"""Dynamic mode decomposition variants on sequential or Hankel data.

Four decompositions of a data pair (X, Y) where Y holds the one-step
advance of X's columns:

* companion_dmd: fits the last column of a sequential data matrix as a
  linear combination of the earlier ones and eigendecomposes the
  resulting companion matrix. Cheap, but ill-conditioned for noisy or
  nearly dependent data; refuses rank-deficient input.
* svd_dmd: projects the one-step map onto the full left singular basis
  of X and eigendecomposes the projected operator.
* exact_dmd: same projection on a hard-thresholded SVD of X; returns
  both exact modes (eigenvectors of the full-size one-step operator for
  eigenvalues inside the data range) and projected modes.
* hankel_dmd: exact_dmd applied to a composite Hankel pair; the
  projected modes are samples of Koopman eigenfunctions along the
  trajectory, which is what this variant returns as its modes.

Eigenvalues are ordered by descending data energy of their modes (least
squares against the first data column), ties broken by descending
modulus, then ascending phase in [0, 2*pi).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .embed import CompositeData
from .errors import DecompositionError, RankDeficiencyError
from .ioutil import write_csv, write_json

ALGORITHMS = ("companion", "svd", "exact", "hankel")

#: Default hard singular-value threshold for Hankel data (absolute mode).
DEFAULT_HANKEL_THRESHOLD = 1e-10

#: Eigenvalues at or below this magnitude have no exact mode (division by
#: the eigenvalue would overflow); the projected mode is substituted.
_ZERO_EIG = 1e-300


@dataclass(frozen=True)
class DmdResult:
    """Eigenvalues and modes of one decomposition.

    modes: complex columns, unit 2-norm unless sqrt_m rescaling was
        requested; for the hankel algorithm these are the projected modes,
        i.e. eigenfunction samples along the trajectory (row = sample).
    projected_modes: the projected modes chi_j when the algorithm also
        produces exact modes (exact only), else None.
    residual: companion fit residual, or SVD truncation tail energy
        sqrt(sum of dropped sigma^2) for the SVD-based variants.
    condition: condition number of the fitted basis (companion only).
    undefined_exact: indices whose eigenvalue was (numerically) zero, so
        the exact mode is undefined and the projected mode was substituted.
    """

    eigenvalues: np.ndarray
    modes: np.ndarray
    projected_modes: np.ndarray | None
    rank_kept: int
    residual: float
    algorithm: str
    dt: float
    condition: float | None = None
    undefined_exact: tuple[int, ...] = ()


def companion_matrix(coefficients) -> np.ndarray:
    """k x k companion matrix: ones on the subdiagonal, coefficients in the
    last column, zeros elsewhere."""
    c = np.asarray(coefficients, dtype=float)
    if c.ndim != 1 or c.size == 0:
        raise ValueError(f"coefficients must be a non-empty vector, got shape {c.shape}")
    k = c.size
    mat = np.zeros((k, k))
    for i in range(k - 1):
        mat[i + 1, i] = 1.0
    mat[:, -1] = c
    return mat


def _unit_columns(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0.0):
        raise DecompositionError("decomposition produced a zero mode")
    return m / norms


def _quantize(x: np.ndarray) -> np.ndarray:
    # Collapse roundoff-level differences so the documented tie-breaks
    # (modulus, then phase) actually engage for conjugate pairs.
    return np.array([float(f"{v:.12g}") for v in x])


def _energy_order(eigenvalues: np.ndarray, modes: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """Permutation ordering modes by their least-squares share of x0."""
    coeffs, *_ = np.linalg.lstsq(modes, x0.astype(complex), rcond=None)
    energy = np.abs(coeffs) * np.linalg.norm(modes, axis=0)
    phase = np.mod(np.angle(eigenvalues), 2.0 * np.pi)
    # lexsort: last key is primary.
    return np.lexsort((phase, -_quantize(np.abs(eigenvalues)), -_quantize(energy)))


def companion_dmd(D, k: int, dt: float = 1.0) -> DmdResult:
    """Companion-matrix DMD on sequential data columns.

    Uses the first k columns of D as the basis X, fits column k as X @ c
    in least squares, and eigendecomposes the companion matrix of c.
    Modes are X @ w_j, normalized. Requires X to have full numerical
    column rank; rank-deficient input raises RankDeficiencyError (use the
    SVD-based variants there instead).
    """
    d = linalg.as_matrix(D, "D")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if d.shape[1] < k + 1:
        raise ValueError(f"D needs at least k+1={k + 1} columns, got {d.shape[1]}")
    x = d[:, :k]
    target = d[:, k]
    sv = np.linalg.svd(x, compute_uv=False)
    if sv[0] == 0.0 or sv[-1] < linalg.DEFAULT_RANK_TOL * sv[0]:
        cond = np.inf if sv[-1] == 0.0 else sv[0] / sv[-1]
        raise RankDeficiencyError(
            f"companion basis is rank deficient (condition number {cond:.3e}); "
            "use svd_dmd or exact_dmd with a threshold"
        )
    cond = float(sv[0] / sv[-1])
    c = linalg.pinv(x) @ target
    er = linalg.eig(companion_matrix(c))
    modes = _unit_columns(x.astype(complex) @ er.eigenvectors)
    residual = float(np.linalg.norm(target - x @ c))
    order = _energy_order(er.eigenvalues, modes, d[:, 0])
    return DmdResult(
        eigenvalues=er.eigenvalues[order],
        modes=modes[:, order],
        projected_modes=None,
        rank_kept=k,
        residual=residual,
        algorithm="companion",
        dt=dt,
        condition=cond,
    )


def svd_dmd(X, Y, dt: float = 1.0) -> DmdResult:
    """SVD-enhanced DMD: project the one-step map onto the full left
    singular basis of X (no truncation).

    X must have no numerically zero singular values; otherwise the
    projected operator is not defined and exact_dmd with a threshold is
    the right tool.
    """
    x = linalg.as_matrix(X, "X")
    y = linalg.as_matrix(Y, "Y")
    if x.shape != y.shape:
        raise ValueError(f"X and Y must have equal shapes, got {x.shape} vs {y.shape}")
    r = linalg.svd(x)
    tiny = np.finfo(float).eps * max(x.shape)
    if r.S[0] == 0.0 or r.S[-1] <= tiny * r.S[0]:
        raise DecompositionError(
            "X has numerically zero singular values; use exact_dmd with a threshold"
        )
    atilde = (r.W.T @ y @ r.V) / r.S[None, :]
    er = linalg.eig(atilde)
    modes = _unit_columns(r.W.astype(complex) @ er.eigenvectors)
    order = _energy_order(er.eigenvalues, modes, x[:, 0])
    return DmdResult(
        eigenvalues=er.eigenvalues[order],
        modes=modes[:, order],
        projected_modes=None,
        rank_kept=r.S.size,
        residual=0.0,
        algorithm="svd",
        dt=dt,
    )


def _thresholded_core(x: np.ndarray, y: np.ndarray, svd_threshold: float, threshold_mode: str):
    if svd_threshold < 0 or not np.isfinite(svd_threshold):
        raise ValueError(f"svd_threshold must be finite and >= 0, got {svd_threshold}")
    if threshold_mode not in ("abs", "rel"):
        raise ValueError(f"threshold_mode must be 'abs' or 'rel', got {threshold_mode!r}")
    r = linalg.svd(x)
    cutoff = svd_threshold * r.S[0] if threshold_mode == "rel" else svd_threshold
    keep = r.S >= cutoff
    if not np.any(keep):
        raise DecompositionError(
            f"all singular values fall below the threshold ({cutoff:.3e}); "
            "nothing to decompose"
        )
    w = r.W[:, keep]
    s = r.S[keep]
    v = r.V[:, keep]
    atilde = (w.T @ y @ v) / s[None, :]
    er = linalg.eig(atilde)
    projected = w.astype(complex) @ er.eigenvectors
    # Exact modes: eigenvectors of the full-size one-step operator,
    # recovered as (1/lambda) Y V S^{-1} w for nonzero eigenvalues.
    b = y @ (v / s[None, :])
    undefined = tuple(int(i) for i in np.flatnonzero(np.abs(er.eigenvalues) <= _ZERO_EIG))
    exact = np.empty_like(projected)
    for j in range(er.eigenvalues.size):
        if j in undefined:
            exact[:, j] = projected[:, j]
        else:
            exact[:, j] = (b @ er.eigenvectors[:, j]) / er.eigenvalues[j]
    residual = float(np.sqrt(np.sum(r.S[~keep] ** 2)))
    return er.eigenvalues, exact, projected, int(np.sum(keep)), residual, undefined


def exact_dmd(X, Y, svd_threshold: float = DEFAULT_HANKEL_THRESHOLD,
              threshold_mode: str = "rel", dt: float = 1.0) -> DmdResult:
    """Exact DMD on a hard-thresholded SVD of X.

    threshold_mode="rel" drops singular values below svd_threshold * S_max
    (default); "abs" compares against the threshold directly. Returns
    exact modes as `modes` and projected modes separately; zero
    eigenvalues have no exact mode, are listed in undefined_exact, and
    carry their projected mode instead.
    """
    x = linalg.as_matrix(X, "X")
    y = linalg.as_matrix(Y, "Y")
    if x.shape != y.shape:
        raise ValueError(f"X and Y must have equal shapes, got {x.shape} vs {y.shape}")
    vals, exact, projected, rank, residual, undefined = _thresholded_core(
        x, y, svd_threshold, threshold_mode
    )
    exact = _unit_columns(exact)
    projected = _unit_columns(projected)
    order = _energy_order(vals, exact, x[:, 0])
    inverse = np.empty_like(order)
    inverse[order] = np.arange(order.size)
    return DmdResult(
        eigenvalues=vals[order],
        modes=exact[:, order],
        projected_modes=projected[:, order],
        rank_kept=rank,
        residual=residual,
        algorithm="exact",
        dt=dt,
        undefined_exact=tuple(sorted(int(inverse[j]) for j in undefined)),
    )


def hankel_dmd(data: CompositeData, svd_threshold: float = DEFAULT_HANKEL_THRESHOLD,
               dt: float = 1.0, threshold_mode: str = "abs",
               sqrt_m_scaling: bool = False) -> DmdResult:
    """Exact DMD on composite Hankel data; modes are eigenfunction samples.

    The returned modes are the projected modes chi_j = W w_j, whose rows
    sample the Koopman eigenfunctions along the trajectory (row i is
    sample i; with interleaved trajectories row c*i+p is trajectory p at
    sample i). With sqrt_m_scaling the columns are multiplied by
    sqrt(rows), normalizing them to unit empirical norm instead of unit
    2-norm. The default threshold is absolute, which matches the hard
    cutoff customarily applied to order-one signals.
    """
    if not isinstance(data, CompositeData):
        raise TypeError("hankel_dmd expects CompositeData (see embed.composite)")
    x, y = data.X, data.Y
    vals, _exact, projected, rank, residual, _undefined = _thresholded_core(
        x, y, svd_threshold, threshold_mode
    )
    projected = _unit_columns(projected)
    order = _energy_order(vals, projected, x[:, 0])
    modes = projected[:, order]
    if sqrt_m_scaling:
        modes = modes * np.sqrt(x.shape[0])
    return DmdResult(
        eigenvalues=vals[order],
        modes=modes,
        projected_modes=None,
        rank_kept=rank,
        residual=residual,
        algorithm="hankel",
        dt=dt,
    )


@dataclass(frozen=True)
class LinearConsistencyReport:
    """Outcome of the X c = 0 implies Y c = 0 check.

    max_violation is the largest column norm of Y restricted to the
    numerical null space of X; threshold is tol * ||Y||_F.
    """

    consistent: bool
    null_dim: int
    max_violation: float
    threshold: float
    tol: float


def check_linear_consistency(X, Y, tol: float = 1e-10) -> LinearConsistencyReport:
    """Check whether every null vector of X is also a null vector of Y.

    Null directions are right singular vectors of X with singular value
    below tol (absolute). When the report is consistent, a single linear
    operator A with Y = A X exists exactly within the stated tolerance.
    """
    x = linalg.as_matrix(X, "X")
    y = linalg.as_matrix(Y, "Y")
    if x.shape != y.shape:
        raise ValueError(f"X and Y must have equal shapes, got {x.shape} vs {y.shape}")
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    _, s, vh = np.linalg.svd(x, full_matrices=True)
    padded = np.zeros(x.shape[1])
    padded[: s.size] = s
    null_mask = padded < tol
    null_dim = int(np.sum(null_mask))
    threshold = float(tol * np.linalg.norm(y))
    if null_dim == 0:
        return LinearConsistencyReport(True, 0, 0.0, threshold, tol)
    n = vh.T[:, null_mask]
    violation = float(np.max(np.linalg.norm(y @ n, axis=0)))
    return LinearConsistencyReport(violation <= threshold, null_dim, violation, threshold, tol)


def result_to_dict(result: DmdResult) -> dict:
    """JSON-ready summary: algorithm, dt, rank, residual, eigenvalue table."""
    eigs = []
    for lam in result.eigenvalues:
        lam = complex(lam)
        modulus = abs(lam)
        freq = None if modulus == 0.0 else float(np.angle(lam)) / result.dt
        eigs.append(
            {
                "re": float(lam.real),
                "im": float(lam.imag),
                "modulus": float(modulus),
                "freq_rad_per_s": freq,
            }
        )
    return {
        "algorithm": result.algorithm,
        "dt": float(result.dt),
        "rank_kept": int(result.rank_kept),
        "residual": float(result.residual),
        "eigenvalues": eigs,
    }


def write_result_json(result: DmdResult, path) -> None:
    write_json(path, result_to_dict(result))


def write_modes_csv(result: DmdResult, path) -> None:
    """Mode samples, one complex column per mode as re/im column pairs."""
    k = result.modes.shape[1]
    header = []
    for j in range(k):
        header += [f"mode{j + 1}_re", f"mode{j + 1}_im"]
    rows = []
    for i in range(result.modes.shape[0]):
        row = []
        for j in range(k):
            row += [float(result.modes[i, j].real), float(result.modes[i, j].imag)]
        rows.append(row)
    write_csv(path, header, rows)

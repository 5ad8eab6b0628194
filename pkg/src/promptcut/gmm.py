"""Full-covariance color Gaussian mixtures with EM fitting.

Scoring runs in the log domain throughout (Cholesky factors plus
log-sum-exp), so tiny densities never underflow to -inf.  Covariances are
stored with the diagonal regularizer already added; a flat color region
therefore fits to ``reg_eps * I`` instead of a singular matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import clustering
from .errors import DegenerateInputError, ModelDegenerateError

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class GmmModel:
    weights: np.ndarray  # (K,), sums to 1
    means: np.ndarray  # (K, D)
    covariances: np.ndarray  # (K, D, D), symmetric positive-definite
    reg_eps: float = 1e-4
    log_likelihood_history: list[float] = field(default_factory=list)
    reseed_iterations: list[int] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]


def _cholesky_factors(model: GmmModel) -> tuple[np.ndarray, np.ndarray]:
    """Lower Cholesky factor and log-determinant per component."""
    try:
        chol = np.linalg.cholesky(model.covariances)
    except np.linalg.LinAlgError as exc:
        raise ModelDegenerateError(f"covariance not positive-definite: {exc}") from exc
    logdet = 2.0 * np.sum(np.log(np.diagonal(chol, axis1=1, axis2=2)), axis=1)
    return chol, logdet


def component_log_pdf(model: GmmModel, colors: np.ndarray) -> np.ndarray:
    """(N, K) log densities of each sample under each component."""
    colors = np.atleast_2d(np.asarray(colors, dtype=np.float64))
    chol, logdet = _cholesky_factors(model)
    n, d = colors.shape
    out = np.empty((n, model.k), dtype=np.float64)
    for j in range(model.k):
        diff = colors - model.means[j]
        # Solve L y = diff^T; the mahalanobis distance is ||y||^2.
        sol = np.linalg.solve(chol[j], diff.T)
        maha = np.sum(sol * sol, axis=0)
        out[:, j] = -0.5 * (d * _LOG_2PI + logdet[j] + maha)
    return out


def log_prob(model: GmmModel, colors: np.ndarray) -> np.ndarray | float:
    """Log mixture density, accumulated in the log domain.

    Accepts a single color vector (returns a float) or an (N, D) batch
    (returns an (N,) array).
    """
    single = np.asarray(colors).ndim == 1
    log_pdf = component_log_pdf(model, colors) + np.log(model.weights)[np.newaxis, :]
    m = log_pdf.max(axis=1, keepdims=True)
    out = (m + np.log(np.sum(np.exp(log_pdf - m), axis=1, keepdims=True)))[:, 0]
    return float(out[0]) if single else out


def posterior(model: GmmModel, colors: np.ndarray) -> np.ndarray:
    """Per-component responsibilities; rows sum to one.

    Accepts a single color vector (returns shape (K,)) or an (N, D) batch
    (returns (N, K)).
    """
    single = np.asarray(colors).ndim == 1
    log_pdf = component_log_pdf(model, colors) + np.log(model.weights)[np.newaxis, :]
    m = log_pdf.max(axis=1, keepdims=True)
    unnorm = np.exp(log_pdf - m)
    gamma = unnorm / unnorm.sum(axis=1, keepdims=True)
    return gamma[0] if single else gamma


def _m_step(
    pixels: np.ndarray, gamma: np.ndarray, reg_eps: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n, d = pixels.shape
    mass = gamma.sum(axis=0)  # (K,)
    weights = mass / n
    means = (gamma.T @ pixels) / mass[:, np.newaxis]
    k = gamma.shape[1]
    covs = np.empty((k, d, d), dtype=np.float64)
    for j in range(k):
        diff = pixels - means[j]
        covs[j] = (gamma[:, j, np.newaxis] * diff).T @ diff / mass[j]
        covs[j] += reg_eps * np.eye(d)
    return weights, means, covs


def _init_from_assignment(
    pixels: np.ndarray, assignment: np.ndarray, k: int, reg_eps: float
) -> GmmModel:
    gamma = np.zeros((pixels.shape[0], k), dtype=np.float64)
    gamma[np.arange(pixels.shape[0]), assignment] = 1.0
    # Guard empty clusters at init with a uniform sliver of responsibility.
    empty = gamma.sum(axis=0) == 0
    if empty.any():
        gamma[:, empty] = 1e-6
        gamma /= gamma.sum(axis=1, keepdims=True)
    weights, means, covs = _m_step(pixels, gamma, reg_eps)
    return GmmModel(weights=weights, means=means, covariances=covs, reg_eps=reg_eps)


def fit(
    pixels: np.ndarray,
    k: int,
    seed: int = 0,
    max_iter: int = 20,
    tol: float = 1e-5,
    reg_eps: float = 1e-4,
    init_model: GmmModel | None = None,
    starvation_mass: float = 1e-8,
) -> GmmModel:
    """EM fit, initialized from KMeans(k) (or a previous model when warm
    starting).

    The mean log-likelihood is non-decreasing across iterations except
    immediately after a starvation re-seed, which moves a dead component
    onto the lowest-likelihood pixel; re-seed steps are recorded in
    ``reseed_iterations``.
    """
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim != 2:
        raise ValueError(f"expected (N, D) pixel matrix, got {pixels.shape}")
    n = pixels.shape[0]
    if n < k:
        raise DegenerateInputError(f"{n} pixels < K={k}")

    if init_model is not None:
        model = GmmModel(
            weights=init_model.weights.copy(),
            means=init_model.means.copy(),
            covariances=init_model.covariances.copy(),
            reg_eps=reg_eps,
        )
    else:
        try:
            km = clustering.kmeans_fit(pixels, k, seed=seed)
            assignment = km.assignment
        except DegenerateInputError:
            # Fewer distinct pixels than components: round-robin over a
            # seeded shuffle still gives a valid (if arbitrary) split.
            rng = np.random.default_rng(seed)
            assignment = rng.permutation(n).astype(np.int64) % k
        model = _init_from_assignment(pixels, assignment, k, reg_eps)

    history: list[float] = []
    reseeds: list[int] = []
    prev_ll = -np.inf
    for it in range(max_iter):
        log_pdf = component_log_pdf(model, pixels) + np.log(model.weights)
        m = log_pdf.max(axis=1, keepdims=True)
        log_norm = m[:, 0] + np.log(np.sum(np.exp(log_pdf - m), axis=1))
        gamma = np.exp(log_pdf - log_norm[:, np.newaxis])
        ll = float(log_norm.mean())
        history.append(ll)

        starved = gamma.sum(axis=0) < starvation_mass
        if starved.any():
            reseeds.append(it)
            worst = int(np.argmin(log_norm))
            for j in np.nonzero(starved)[0]:
                model.means[j] = pixels[worst]
                model.covariances[j] = reg_eps * np.eye(model.dim)
                model.weights[j] = 1.0 / n
            model.weights /= model.weights.sum()
            prev_ll = -np.inf
            continue

        model.weights, model.means, model.covariances = _m_step(
            pixels, gamma, reg_eps
        )
        if ll - prev_ll < tol and np.isfinite(prev_ll):
            prev_ll = ll
            break
        prev_ll = ll

    model.log_likelihood_history = history
    model.reseed_iterations = reseeds
    return model

"""Two-component Gaussian mixture fitting by expectation maximisation.

Within one analysis interval the envelope amplitude is modelled as a mixture
of two univariate Gaussians: a high-mean component for normal breathing and a
low-mean component for apnea.  ``fit_gmm_em`` estimates the mixture by EM and
``temporary_labels`` turns the per-sample responsibilities into a binary
apnea track for that interval.

The likelihood surface of real envelope data is multimodal: segment
transitions reward a wide background component that swallows both breathing
modes, a local optimum that ruins the labels.  The fit therefore runs EM
from a small fixed family of deterministic starts, one with means at the
25th/75th sample percentiles and the rest derived from quantile partitions
of the sorted samples, and keeps the run with the highest final
log-likelihood.  Identical samples give bit-identical fits; an optional
seeded random-restart mode exists for robustness experiments.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewSamples
from .series import ScalarSeries

VARIANCE_FLOOR = 1e-4  # mm^2; component spread below 0.01 mm is beyond the
# displacement resolution of the radar, and a floor there also keeps the
# tight low-amplitude component from rejecting segment-transition samples
EMPTY_COMPONENT_WEIGHT = 1e-6

DEFAULT_MAX_ITER = 200
DEFAULT_TOL = 1e-8  # absolute log-likelihood change


@dataclass(frozen=True)
class LabelRuleConfig:
    """Ratio threshold used when converting responsibilities to labels.

    A sample is labelled apnea only when it belongs to the low-mean component
    *and* the mean ratio low/high does not exceed ``beta``; the second
    condition suppresses spurious splits of a single breathing mode.
    """

    beta: float = 0.7

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie strictly between 0 and 1")


@dataclass(frozen=True, eq=False)
class GmmFit:
    """Fitted two-component mixture, sorted high-mean first.

    ``log_likelihood_history`` holds one entry per EM iteration (plus the
    final evaluation); it is non-decreasing except across component
    reassignments, counted in ``reassignments``.  ``degenerate`` flags inputs
    whose samples were all identical; such fits carry both means at the
    common value and variances at the floor.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    degenerate: bool = False
    reassignments: int = 0
    log_likelihood_history: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    @property
    def mean_ratio(self) -> float:
        """Low/high mean ratio; defined as 1.0 when the high mean is zero."""
        return float(self.means[1] / self.means[0]) if self.means[0] > 0 else 1.0


@dataclass(frozen=True, eq=False)
class Responsibilities:
    """Per-sample posterior component probabilities, columns ordered like the
    fit's components (high-mean first); rows sum to one."""

    gamma: np.ndarray

    def __len__(self) -> int:
        return self.gamma.shape[0]


def _log_pdf(x: np.ndarray, means: np.ndarray, variances: np.ndarray) -> np.ndarray:
    """(n, 2) array of log N(x | mean_k, variance_k)."""
    diff = x[:, None] - means[None, :]
    return -0.5 * (np.log(2.0 * np.pi * variances)[None, :] + diff * diff / variances[None, :])


def _e_step(x, weights, means, variances):
    """Log-likelihood and responsibilities at the given parameters."""
    with np.errstate(divide="ignore"):
        joint = _log_pdf(x, means, variances) + np.log(weights)[None, :]
    top = joint.max(axis=1)
    log_norm = top + np.log(np.exp(joint - top[:, None]).sum(axis=1))
    gamma = np.exp(joint - log_norm[:, None])
    return float(log_norm.sum()), gamma


def _partition_start(x: np.ndarray, quantile: float):
    """EM start from a hard split of the sorted samples at ``quantile``.

    Means, variances and weights come from the two groups, so the start is
    scale-equivariant and lies in the basin where each component owns one
    side of the split.
    """
    cut = int(round(quantile * x.size))
    cut = min(max(cut, 1), x.size - 1)
    parts = np.partition(x, cut - 1)
    lo, hi = parts[:cut], parts[cut:]
    means = np.array([lo.mean(), hi.mean()])
    variances = np.maximum([lo.var(), hi.var()], VARIANCE_FLOOR)
    weights = np.array([cut / x.size, 1.0 - cut / x.size])
    return means, variances, weights


def _em_run(x, means, variances, weights, max_iter, tol):
    """One EM run from the given start; returns unsorted final parameters."""
    history = []
    prev_ll = -np.inf
    converged = False
    reassignments = 0
    for _ in range(max_iter):
        ll, gamma = _e_step(x, weights, means, variances)
        history.append(ll)
        if abs(ll - prev_ll) < tol:
            converged = True
            break
        prev_ll = ll

        counts = gamma.sum(axis=0)
        if counts.min() < EMPTY_COMPONENT_WEIGHT * x.size:
            # Empty-component pathology: restart the starved component on the
            # sample farthest from the surviving one.
            k = int(counts.argmin())
            other = 1 - k
            means[k] = x[np.argmax(np.abs(x - means[other]))]
            variances[:] = max(float(x.var()), VARIANCE_FLOOR)
            weights[:] = 0.5
            reassignments += 1
            prev_ll = -np.inf
            continue
        weights = counts / x.size
        means = (gamma * x[:, None]).sum(axis=0) / counts
        diff = x[:, None] - means[None, :]
        variances = np.maximum((gamma * diff * diff).sum(axis=0) / counts, VARIANCE_FLOOR)
    return weights, means, variances, history, converged, reassignments


def fit_gmm_em(
    samples,
    max_iter: int = DEFAULT_MAX_ITER,
    tol: float = DEFAULT_TOL,
    restarts: int = 0,
    seed: int | None = None,
) -> tuple[GmmFit, Responsibilities]:
    """Fit a two-component univariate Gaussian mixture to envelope samples.

    Parameters
    ----------
    samples : array-like
        Envelope amplitudes, mm; at least 4 finite, non-negative values.
    max_iter, tol
        EM stops when the absolute log-likelihood change drops below ``tol``
        or after ``max_iter`` iterations.
    restarts, seed
        Number of additional seeded random starts; the run with the highest
        final log-likelihood wins.  The default (0) is fully deterministic.

    Returns
    -------
    (GmmFit, Responsibilities)
        Components sorted high-mean first; responsibilities are evaluated at
        the returned (sorted) parameters.

    Raises
    ------
    TooFewSamples
        If fewer than 4 samples are supplied.
    ValueError
        If any sample is non-finite or negative.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 4:
        raise TooFewSamples(f"need at least 4 samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    if x.min() < 0:
        raise ValueError("envelope samples must be non-negative")

    if np.all(x == x[0]):
        value = float(x[0])
        means = np.array([value, value])
        weights = np.array([0.5, 0.5])
        variances = np.array([VARIANCE_FLOOR, VARIANCE_FLOOR])
        ll, gamma = _e_step(x, weights, means, variances)
        fit = GmmFit(
            weights=weights,
            means=means,
            variances=variances,
            log_likelihood=ll,
            iterations=0,
            converged=True,
            degenerate=True,
            log_likelihood_history=np.array([ll]),
        )
        return fit, Responsibilities(gamma)

    base_variance = max(float(x.var()), VARIANCE_FLOOR)
    starts = [
        (
            np.percentile(x, [25.0, 75.0]),
            np.array([base_variance, base_variance]),
            np.array([0.5, 0.5]),
        )
    ]
    starts += [_partition_start(x, q) for q in (0.25, 0.5, 0.75)]
    if restarts > 0:
        rng = np.random.default_rng(seed)
        starts += [
            (
                rng.choice(x, size=2, replace=False),
                np.array([base_variance, base_variance]),
                np.array([0.5, 0.5]),
            )
            for _ in range(restarts)
        ]

    best = None
    for start_means, start_variances, start_weights in starts:
        run = _em_run(
            x,
            np.array(start_means, dtype=float),
            np.array(start_variances, dtype=float),
            np.array(start_weights, dtype=float),
            max_iter,
            tol,
        )
        if best is None or run[3][-1] > best[3][-1]:
            best = run
    weights, means, variances, history, converged, reassignments = best

    order = np.argsort(means)[::-1]  # high-mean first
    weights, means, variances = weights[order], means[order], variances[order]
    ll, gamma = _e_step(x, weights, means, variances)
    if not converged:
        history = history + [ll]  # parameters moved after the last recorded value
    fit = GmmFit(
        weights=weights,
        means=means,
        variances=variances,
        log_likelihood=ll,
        iterations=len(history),
        converged=converged,
        reassignments=reassignments,
        log_likelihood_history=np.asarray(history),
    )
    return fit, Responsibilities(gamma)


def temporary_labels(
    fit: GmmFit,
    resp: Responsibilities,
    rule: LabelRuleConfig = LabelRuleConfig(),
    sample_rate: float = 10.0,
    start_time: float = 0.0,
) -> ScalarSeries:
    """Binary apnea track for one interval.

    A sample is labelled 1 when the low-mean component is at least as
    responsible for it as the high-mean one (ties label 1) *and* the mean
    ratio does not exceed ``rule.beta``.  When the ratio condition fails the
    whole interval is labelled 0 regardless of the responsibilities.
    """
    if fit.mean_ratio <= rule.beta:
        labels = (resp.gamma[:, 0] <= resp.gamma[:, 1]).astype(float)
    else:
        labels = np.zeros(len(resp))
    return ScalarSeries(labels, sample_rate, start_time, role="labels")

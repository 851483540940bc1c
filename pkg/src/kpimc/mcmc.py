"""Metropolis-Hastings sampling of Gaussian parameters (mu, sigma).

The target is the posterior of a Gaussian data model under a flat
improper prior restricted to sigma > 0.  Proposals perturb both
coordinates jointly with independent normal steps, acceptance is decided
in log space (``ln u < min(0, log_alpha)``), and the normalizing constant
of the posterior never appears: only log-posterior differences do.

The first ``floor(burn_in_fraction * iterations)`` states are discarded
before summarization; 1-2% is plenty here because chains start from the
sample moments rather than an arbitrary point.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import EmptyChainError, EmptyDatasetError, InvalidParameterError
from .kpi_data import Dataset
from .rng import RngStream

DEFAULT_ITERATIONS = 10_000
DEFAULT_BURN_IN_FRACTION = 0.02
_MIN_PROPOSAL_SCALE = 1e-3


@dataclass(frozen=True)
class ParamState:
    """A (mu, sigma) point.

    Candidates with sigma <= 0 are representable on purpose; the flat
    prior assigns them -inf log density so they are never accepted.
    """

    mu: float
    sigma: float


@dataclass(frozen=True)
class ProposalSpec:
    """Normal random-walk step widths for the two coordinates."""

    mu_scale: float
    sigma_scale: float

    def __post_init__(self):
        if not (self.mu_scale > 0.0 and self.sigma_scale > 0.0):
            raise InvalidParameterError("proposal scales must be > 0")


@dataclass(frozen=True)
class McmcSettings:
    """Chain-length and proposal defaults used by the experiment runner.

    ``mu_scale``/``sigma_scale`` of None means derive them from the data
    via :func:`default_proposal_spec`.
    """

    iterations: int = DEFAULT_ITERATIONS
    burn_in_fraction: float = DEFAULT_BURN_IN_FRACTION
    mu_scale: float | None = None
    sigma_scale: float | None = None

    def __post_init__(self):
        if self.iterations < 100:
            raise InvalidParameterError("iterations must be >= 100")
        if not 0.0 <= self.burn_in_fraction <= 0.5:
            raise InvalidParameterError("burn_in_fraction must be in [0, 0.5]")


@dataclass(frozen=True)
class MhStepOutcome:
    """Result of a single proposal: the new state and what happened."""

    next: ParamState
    accepted: bool
    log_alpha: float


@dataclass
class Chain:
    """Post-burn-in states plus acceptance diagnostics."""

    mus: np.ndarray
    sigmas: np.ndarray
    log_posterior_trace: np.ndarray
    accepted_trace: np.ndarray
    burn_in_count: int
    proposed_count: int
    accepted_count: int

    def __len__(self) -> int:
        return self.mus.shape[0]

    @property
    def states(self) -> list[ParamState]:
        return [ParamState(float(m), float(s))
                for m, s in zip(self.mus, self.sigmas)]


class PosteriorSummary(NamedTuple):
    mu_hat: float
    sigma_hat: float
    acceptance_rate: float


def log_likelihood_normal(d: Dataset, mu: float, sigma: float) -> float:
    """Gaussian log-likelihood of the dataset at (mu, sigma)."""
    if len(d) == 0:
        raise EmptyDatasetError("cannot evaluate likelihood of an empty dataset")
    if not sigma > 0.0:
        raise InvalidParameterError(f"sigma must be > 0 (got {sigma})")
    return float(kernels.gaussian_loglik(d.values, mu, sigma))


def log_prior(p: ParamState) -> float:
    """Flat improper prior: 0 on sigma > 0, -inf elsewhere."""
    return 0.0 if p.sigma > 0.0 else -np.inf


def log_acceptance(d: Dataset, current: ParamState,
                   candidate: ParamState) -> float:
    """log of the MH acceptance ratio between two explicit states.

    Useful for testing with injected candidates; the sampling path
    computes the same quantity inside the kernels.
    """
    if not current.sigma > 0.0:
        raise InvalidParameterError("current state must have sigma > 0")
    if candidate.sigma <= 0.0:
        return -np.inf
    return (log_likelihood_normal(d, candidate.mu, candidate.sigma)
            - log_likelihood_normal(d, current.mu, current.sigma))


def accept_candidate(log_alpha: float, u: float) -> bool:
    """The MH acceptance rule, ln(u) < min(0, log_alpha), for u in (0, 1)."""
    if not 0.0 < u < 1.0:
        raise InvalidParameterError("u must be strictly inside (0, 1)")
    return np.log(u) < min(0.0, log_alpha)


def initial_state(d: Dataset) -> ParamState:
    """Data-driven start point: the sample mean and sample std."""
    if len(d) < 2:
        raise EmptyDatasetError("need at least two observations to initialize")
    return ParamState(float(np.mean(d.values)),
                      float(np.std(d.values, ddof=1)))


def default_proposal_spec(d: Dataset) -> ProposalSpec:
    """Step widths of about five standard errors of the mean.

    mu_scale = 0.5 * std(d) / sqrt(n) * 10, sigma_scale half of that,
    both clamped to at least 1e-3 so degenerate data cannot freeze the
    walk.
    """
    if len(d) < 2:
        raise EmptyDatasetError("need at least two observations for proposals")
    n = len(d)
    mu_scale = 0.5 * float(np.std(d.values, ddof=1)) / np.sqrt(n) * 10.0
    mu_scale = max(mu_scale, _MIN_PROPOSAL_SCALE)
    sigma_scale = max(0.5 * mu_scale, _MIN_PROPOSAL_SCALE)
    return ProposalSpec(mu_scale=mu_scale, sigma_scale=sigma_scale)


def resolve_proposal_spec(d: Dataset, settings: McmcSettings) -> ProposalSpec:
    if settings.mu_scale is None and settings.sigma_scale is None:
        return default_proposal_spec(d)
    derived = default_proposal_spec(d)
    return ProposalSpec(
        mu_scale=settings.mu_scale if settings.mu_scale is not None
        else derived.mu_scale,
        sigma_scale=settings.sigma_scale if settings.sigma_scale is not None
        else derived.sigma_scale)


def mh_step(current: ParamState, d: Dataset, spec: ProposalSpec,
            s: RngStream) -> MhStepOutcome:
    """One MH transition; consumes exactly three uniforms from the stream."""
    if not current.sigma > 0.0:
        raise InvalidParameterError("current state must have sigma > 0")
    _require_estimable(d)
    ll = kernels.gaussian_loglik(d.values, current.mu, current.sigma)
    gen = s.generator
    u0 = gen.random()
    u1 = gen.random()
    u2 = gen.random()
    mu, sigma, _, accepted, log_alpha = kernels.mh_step_uniforms(
        d.values, current.mu, current.sigma, ll,
        spec.mu_scale, spec.sigma_scale, u0, u1, u2)
    return MhStepOutcome(next=ParamState(float(mu), float(sigma)),
                         accepted=bool(accepted),
                         log_alpha=float(log_alpha))


def _require_estimable(d: Dataset) -> None:
    if len(d) == 0:
        raise EmptyDatasetError("dataset is empty")


def run_chain(d: Dataset, init: ParamState, iterations: int,
              burn_in_fraction: float, spec: ProposalSpec,
              s: RngStream) -> Chain:
    """Run ``iterations`` MH steps from ``init`` and discard the burn-in."""
    _require_estimable(d)
    if iterations < 100:
        raise InvalidParameterError("iterations must be >= 100")
    if not 0.0 <= burn_in_fraction <= 0.5:
        raise InvalidParameterError("burn_in_fraction must be in [0, 0.5]")
    if not init.sigma > 0.0:
        raise InvalidParameterError("init.sigma must be > 0")
    mus, sigmas, logps, accepted = kernels.mh_chain(
        s.generator, d.values, init.mu, init.sigma,
        spec.mu_scale, spec.sigma_scale, iterations)
    burn = int(np.floor(burn_in_fraction * iterations))
    return Chain(
        mus=mus[burn:],
        sigmas=sigmas[burn:],
        log_posterior_trace=logps[burn:],
        accepted_trace=accepted[burn:],
        burn_in_count=burn,
        proposed_count=iterations,
        accepted_count=int(np.count_nonzero(accepted)),
    )


def posterior_summary(c: Chain) -> PosteriorSummary:
    """Posterior means of mu and sigma plus the overall acceptance rate."""
    if len(c) == 0:
        raise EmptyChainError("chain has no post-burn-in states")
    return PosteriorSummary(
        mu_hat=float(np.mean(c.mus)),
        sigma_hat=float(np.mean(c.sigmas)),
        acceptance_rate=c.accepted_count / c.proposed_count,
    )


def fit_gaussian_mcmc(d: Dataset, settings: McmcSettings,
                      s: RngStream) -> tuple[PosteriorSummary, Chain]:
    """Initialize from the data, run a chain, and summarize it."""
    init = initial_state(d)
    spec = resolve_proposal_spec(d, settings)
    chain = run_chain(d, init, settings.iterations,
                      settings.burn_in_fraction, spec, s)
    return posterior_summary(chain), chain


def write_chain_csv(chain: Chain, dest) -> None:
    """Trace export (``step,mu,sigma,log_posterior,accepted``).

    ``step`` is the absolute iteration index, so plots show where the
    retained states sit relative to the discarded burn-in.
    """
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="") as fh:
            write_chain_csv(chain, fh)
            return
    dest.write("step,mu,sigma,log_posterior,accepted\n")
    for i in range(len(chain)):
        dest.write(f"{chain.burn_in_count + i},"
                   f"{float(chain.mus[i])!r},"
                   f"{float(chain.sigmas[i])!r},"
                   f"{float(chain.log_posterior_trace[i])!r},"
                   f"{int(chain.accepted_trace[i])}\n")

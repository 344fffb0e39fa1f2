"""Closed-form trial scoring with marginalization over tie hypotheses.

For a single-enrollment, single-test trial the log-likelihood ratio is

    LLR = logsumexp_h Q(same-speaker, h) - logsumexp_h Q(diff-speaker, h)

where h runs over all condition-tie combinations and

    Q = 0.5 log|Sigma| + 0.5 Phi^T Sigma Phi + log prior(h).

Sigma is the posterior covariance of the stacked trial latents
[Z_shared; Z_enroll; Z_test] and Phi its information vector. Everything
that depends only on the hypothesis (the posterior precision, its
Cholesky factor, the log-determinant, the prior) is computed once per
session; a trial costs two projections of size R_z plus one triangular
solve per hypothesis.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np
import scipy.linalg as sla
from scipy.linalg.blas import dtrsv

from .errors import AllHypothesesExcluded, FactorizationFailed, UnknownId
from .hypothesis import (
    HypothesisVector,
    Partition,
    PriorConfig,
    enumerate_condition_hypotheses,
    hypothesis_log_prior,
    partition_factors,
)
from .model import ModelParams, StackedModel, stack_w, validate

__all__ = [
    "HypothesisFactorization",
    "ScoringSession",
    "PosteriorMoments",
    "build_k_sum",
    "precompute_session",
    "compute_phi",
    "q_term",
    "llr",
    "posterior_moments",
    "score_trials",
    "cholesky_counter",
]


class _CholeskyCounter:
    """Counts posterior-precision factorizations, for precompute-contract tests."""

    def __init__(self):
        self.count = 0

    def reset(self):
        self.count = 0


cholesky_counter = _CholeskyCounter()


@dataclass(frozen=True)
class HypothesisFactorization:
    """Everything trial-independent about one full hypothesis.

    Attributes:
      hypothesis: the tie flags this factorization belongs to.
      partition: tied/untied factor split.
      chol: lower Cholesky factor of the posterior precision of
        [Z_shared; Z_enroll; Z_test], Fortran-ordered, size n_s + 2*n_d.
      half_log_det_sigma: 0.5 log|Sigma| = -sum(log diag(chol)).
      log_prior_ss / log_prior_ds: log prior of the condition flags in
        the same-speaker / different-speaker branch (-inf allowed).
    """

    hypothesis: HypothesisVector
    partition: Partition
    chol: np.ndarray
    half_log_det_sigma: float
    log_prior_ss: float
    log_prior_ds: float

    @property
    def size(self) -> int:
        return self.partition.n_s + 2 * self.partition.n_d


@dataclass(frozen=True)
class PosteriorMoments:
    """Posterior mean and covariance of the stacked trial latents."""

    z_hat: np.ndarray
    sigma: np.ndarray


@dataclass(frozen=True)
class ScoringSession:
    """Immutable bundle of a model plus all 2^(N+1) hypothesis factorizations.

    Build once with :func:`precompute_session`, then score any number of
    trials concurrently; all members are read-only.
    """

    model: ModelParams
    stacked: StackedModel
    priors: PriorConfig
    factorizations: MappingProxyType
    dw: np.ndarray
    ss_branch: tuple
    ds_branch: tuple

    def project(self, centered: np.ndarray) -> np.ndarray:
        """All factor loadings' noise-weighted projections W^T D m of one
        centered vector, stacked in model order (length R_z)."""
        return self.dw.T @ centered


def build_k_sum(model: ModelParams, partition: Partition) -> np.ndarray:
    """Posterior precision of [Z_shared; Z_enroll; Z_test] for one hypothesis.

    Block form, with A = W_S^T D W_S, B = W_S^T D W_D, C = W_D^T D W_D::

        [ 2A + I   B       B     ]
        [ B^T      C + I   0     ]
        [ B^T      0       C + I ]

    The result is exactly symmetric and positive definite for any valid
    model: the identity blocks come from the unit prior on the latents.
    """
    n_s, n_d = partition.n_s, partition.n_d
    dws = model.D @ partition.w_s
    dwd = model.D @ partition.w_d
    a = partition.w_s.T @ dws
    a = 0.5 * (a + a.T)
    b = partition.w_s.T @ dwd
    c = partition.w_d.T @ dwd
    c = 0.5 * (c + c.T)

    n = n_s + 2 * n_d
    k = np.zeros((n, n))
    k[:n_s, :n_s] = 2.0 * a + np.eye(n_s)
    k[:n_s, n_s : n_s + n_d] = b
    k[:n_s, n_s + n_d :] = b
    k[n_s : n_s + n_d, :n_s] = b.T
    k[n_s + n_d :, :n_s] = b.T
    k[n_s : n_s + n_d, n_s : n_s + n_d] = c + np.eye(n_d)
    k[n_s + n_d :, n_s + n_d :] = c + np.eye(n_d)
    return k


def _cholesky_lower(k: np.ndarray, hypothesis: HypothesisVector) -> np.ndarray:
    cholesky_counter.count += 1
    try:
        chol = sla.cholesky(k, lower=True)
    except (sla.LinAlgError, ValueError) as exc:
        raise FactorizationFailed(
            f"posterior precision for hypothesis {hypothesis} is not positive "
            "definite; check the model's noise precision"
        ) from exc
    chol = np.asfortranarray(chol)
    chol.setflags(write=False)
    return chol


def precompute_session(model: ModelParams, priors: PriorConfig) -> ScoringSession:
    """Factorize every hypothesis once and cache all projections.

    Raises:
      FactorizationFailed: some posterior precision was not numerically
        SPD (overflowing or otherwise broken model parameters).
    """
    validate(model)
    if priors.n_conditions != model.n_conditions:
        raise ValueError(
            f"priors cover {priors.n_conditions} conditions, model has {model.n_conditions}"
        )
    stacked = stack_w(model)
    dw = model.D @ stacked.W
    dw.setflags(write=False)

    cond_hyps = enumerate_condition_hypotheses(model.n_conditions)
    facts = {}
    for speaker_tied in (True, False):
        for cond in cond_hyps:
            h = HypothesisVector(speaker_tied, cond)
            part = partition_factors(model, h)
            k = build_k_sum(model, part)
            chol = _cholesky_lower(k, h)
            facts[h] = HypothesisFactorization(
                hypothesis=h,
                partition=part,
                chol=chol,
                half_log_det_sigma=-float(np.sum(np.log(np.diag(chol)))),
                log_prior_ss=hypothesis_log_prior(HypothesisVector(True, cond), priors),
                log_prior_ds=hypothesis_log_prior(HypothesisVector(False, cond), priors),
            )
    return ScoringSession(
        model=model,
        stacked=stacked,
        priors=priors,
        factorizations=MappingProxyType(facts),
        dw=dw,
        ss_branch=tuple(facts[HypothesisVector(True, c)] for c in cond_hyps),
        ds_branch=tuple(facts[HypothesisVector(False, c)] for c in cond_hyps),
    )


def _assemble_phi(fact: HypothesisFactorization, proj_sum, proj_e, proj_t) -> np.ndarray:
    part = fact.partition
    return np.concatenate(
        (proj_sum[part.tied_cols], proj_e[part.untied_cols], proj_t[part.untied_cols])
    )


def compute_phi(session: ScoringSession, h: HypothesisVector, m_enroll, m_test) -> np.ndarray:
    """Information vector [W_S^T D (mE+mT); W_D^T D mE; W_D^T D mT].

    Both inputs must already be centered (mean subtracted).
    """
    fact = session.factorizations[h]
    proj_e = session.project(np.asarray(m_enroll, dtype=np.float64))
    proj_t = session.project(np.asarray(m_test, dtype=np.float64))
    return _assemble_phi(fact, proj_e + proj_t, proj_e, proj_t)


def _q_value(fact: HypothesisFactorization, log_prior, proj_sum, proj_e, proj_t) -> float:
    if log_prior == -math.inf:
        return -math.inf
    if fact.size == 0:
        return log_prior
    phi = _assemble_phi(fact, proj_sum, proj_e, proj_t)
    x = dtrsv(fact.chol, phi, lower=1)
    return fact.half_log_det_sigma + 0.5 * float(x @ x) + log_prior


def q_term(session: ScoringSession, speaker_tied: bool, h, m_enroll, m_test) -> float:
    """One hypothesis' contribution 0.5 log|Sigma| + 0.5 Phi^T Sigma Phi + log prior.

    ``h`` is the condition-tie vector; inputs must be centered. Returns
    -inf when the hypothesis prior is zero.
    """
    hv = HypothesisVector(speaker_tied, tuple(h))
    fact = session.factorizations[hv]
    log_prior = fact.log_prior_ss if speaker_tied else fact.log_prior_ds
    proj_e = session.project(np.asarray(m_enroll, dtype=np.float64))
    proj_t = session.project(np.asarray(m_test, dtype=np.float64))
    return _q_value(fact, log_prior, proj_e + proj_t, proj_e, proj_t)


def posterior_moments(
    session: ScoringSession, speaker_tied: bool, h, m_enroll, m_test
) -> PosteriorMoments:
    """Posterior mean Sigma*Phi and covariance Sigma of the trial latents.

    Inputs must be centered. The mean costs two triangular solves; the
    covariance is the inverse posterior precision.
    """
    hv = HypothesisVector(speaker_tied, tuple(h))
    fact = session.factorizations[hv]
    phi = compute_phi(session, hv, m_enroll, m_test)
    n = fact.size
    if n == 0:
        return PosteriorMoments(z_hat=np.zeros(0), sigma=np.zeros((0, 0)))
    x = dtrsv(fact.chol, phi, lower=1)
    z_hat = dtrsv(fact.chol, x, lower=1, trans=1)
    sigma = sla.cho_solve((fact.chol, True), np.eye(n))
    sigma = 0.5 * (sigma + sigma.T)
    return PosteriorMoments(z_hat=z_hat, sigma=sigma)


def _logsumexp(values: np.ndarray) -> float:
    m = np.max(values)
    if m == -math.inf:
        return -math.inf
    return float(m + np.log(np.sum(np.exp(values - m))))


def _branch_logsumexp(session, branch, proj_sum, proj_e, proj_t, use_ss_prior) -> float:
    q = np.empty(len(branch))
    for i, fact in enumerate(branch):
        log_prior = fact.log_prior_ss if use_ss_prior else fact.log_prior_ds
        q[i] = _q_value(fact, log_prior, proj_sum, proj_e, proj_t)
    total = _logsumexp(q)
    if total == -math.inf:
        name = "same-speaker" if use_ss_prior else "different-speaker"
        raise AllHypothesesExcluded(f"every hypothesis in the {name} branch has prior 0")
    return total


def _llr_from_projections(session: ScoringSession, proj_e, proj_t) -> float:
    proj_sum = proj_e + proj_t
    num = _branch_logsumexp(session, session.ss_branch, proj_sum, proj_e, proj_t, True)
    den = _branch_logsumexp(session, session.ds_branch, proj_sum, proj_e, proj_t, False)
    return num - den


def _project_raw(session: ScoringSession, m) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (session.model.d,):
        raise ValueError(f"expected a vector of length {session.model.d}, got shape {m.shape}")
    return session.project(m - session.model.mu)


def llr(session: ScoringSession, m_enroll, m_test) -> float:
    """Log-likelihood ratio for one trial; inputs are raw (uncentered).

    Raises:
      AllHypothesesExcluded: one branch has zero total prior.
    """
    return _llr_from_projections(
        session, _project_raw(session, m_enroll), _project_raw(session, m_test)
    )


def score_trials(session: ScoringSession, enroll, test, trials, threads: int = 1) -> np.ndarray:
    """Score a list of (enroll_id, test_id) pairs against embedding tables.

    Projections are computed once per referenced id; the per-hypothesis
    factorizations come from the session, so no Cholesky runs here. The
    output order matches the input order and is independent of
    ``threads``; every score is bitwise equal to ``llr`` on the pair.

    Args:
      enroll / test: mappings from id to raw embedding vector.
      trials: sequence of (enroll_id, test_id) pairs.
      threads: number of worker threads for the per-trial loop.

    Raises:
      UnknownId: a trial references an id absent from its table.
    """
    trials = [(e, t) for e, t in trials]
    out = np.empty(len(trials))
    if not trials:
        return out

    proj_e, proj_t = {}, {}
    for eid, tid in trials:
        if eid not in proj_e:
            if eid not in enroll:
                raise UnknownId(f"unknown enroll id {eid!r}")
            proj_e[eid] = _project_raw(session, enroll[eid])
        if tid not in proj_t:
            if tid not in test:
                raise UnknownId(f"unknown test id {tid!r}")
            proj_t[tid] = _project_raw(session, test[tid])

    def score_range(lo: int, hi: int) -> None:
        for i in range(lo, hi):
            eid, tid = trials[i]
            out[i] = _llr_from_projections(session, proj_e[eid], proj_t[tid])

    threads = max(1, int(threads))
    if threads == 1 or len(trials) < 2 * threads:
        score_range(0, len(trials))
    else:
        bounds = np.linspace(0, len(trials), threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(score_range, int(lo), int(hi))
                for lo, hi in zip(bounds[:-1], bounds[1:])
            ]
            for f in futures:
                f.result()
    return out

"""Variational mutual-information estimators over paired sample batches.

Two tractable-density bounds (the auxiliary-marginal upper bound and the
leave-one-out upper bound), the decoder-based lower bound, and four
critic-based lower bounds (DV, TUBA, NWJ, InfoNCE). Each estimator comes
as a batch-level value plus the exact gradient of that value with respect
to its trainable components, so a single Adam loop trains any of them.

Log-partition terms always go through max-shifted log-sum-exp; at the
default scales the raw scores can reach +-30, where naive exponentials
would already be meaningless.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from . import critic as nets
from .gaussian import (
    GaussianTask,
    SampleBatch,
    cond_log_density,
    marginal_entropy,
    marginal_log_density,
    pairwise_cond_log_density,
    sample,
    true_mi,
)

__all__ = [
    "EstimatorKind",
    "TrainSettings",
    "EstimateTrajectory",
    "TrainingDiverged",
    "DecoderParams",
    "init_decoder",
    "decoder_mean",
    "est_ba_upper",
    "est_ba_lower",
    "est_l1out",
    "est_dv",
    "est_tuba",
    "est_nwj",
    "est_infonce",
    "est_uba",
    "dv_from_scores",
    "tuba_from_scores",
    "nwj_from_scores",
    "infonce_from_scores",
    "uba_from_scores",
    "train_estimator",
    "trajectory_csv_text",
    "trajectory_filename",
]


class EstimatorKind(Enum):
    """The estimator ladder; `is_upper` gives each bound's direction."""

    BA_UPPER_R = "ba_upper"
    BA_LOWER = "ba_lower"
    L1OUT = "l1out"
    DV = "dv"
    TUBA = "tuba"
    NWJ = "nwj"
    INFONCE = "infonce"

    @property
    def is_upper(self) -> bool:
        return self in (EstimatorKind.BA_UPPER_R, EstimatorKind.L1OUT)

    @property
    def needs_training(self) -> bool:
        return self not in (EstimatorKind.BA_UPPER_R, EstimatorKind.L1OUT)


# ---------------------------------------------------------------------------
# Score-matrix reductions
# ---------------------------------------------------------------------------


def _logsumexp(a: np.ndarray, axis=None):
    """Max-shifted ln sum exp; tolerates -inf entries (masked-out cells)."""
    peak = np.max(a, axis=axis, keepdims=True)
    total = np.sum(np.exp(a - peak), axis=axis)
    if axis is None:
        return float(np.log(total) + peak.ravel()[0])
    return np.log(total) + np.squeeze(peak, axis=axis)


def _offdiag_col_logmeanexp(scores: np.ndarray) -> np.ndarray:
    """Per column j: ln of the mean of e^(s_ij) over i != j."""
    n = scores.shape[0]
    masked = scores.copy()
    np.fill_diagonal(masked, -np.inf)
    return _logsumexp(masked, axis=0) - math.log(n - 1)


def tuba_from_scores(scores: np.ndarray, log_a: np.ndarray) -> float:
    """Diagonal mean minus the tangent-bounded log partition.

    The partition estimate for each y_j is the off-diagonal column mean of
    e^(s); the baseline enters through the inequality
    ln z <= z/a + ln a - 1, tight at z = a.
    """
    col_lme = _offdiag_col_logmeanexp(scores)
    with np.errstate(over="ignore"):  # overflow -> inf, caught by divergence checks
        penalty = np.exp(col_lme - log_a) + log_a - 1.0
    return float(scores.diagonal().mean() - penalty.mean())


def nwj_from_scores(scores: np.ndarray) -> float:
    """Tangent bound with the baseline pinned at a = e (log a = 1)."""
    return tuba_from_scores(scores, np.ones(scores.shape[0]))


def dv_from_scores(scores: np.ndarray) -> float:
    """Diagonal mean minus ln of the global off-diagonal mean of e^(s)."""
    n = scores.shape[0]
    masked = scores.copy()
    np.fill_diagonal(masked, -np.inf)
    return float(scores.diagonal().mean() - (_logsumexp(masked) - math.log(n * (n - 1))))


def infonce_from_scores(scores: np.ndarray) -> float:
    """Mean over rows of s_ii - ln((1/K) sum_j e^(s_ij)); capped at ln K."""
    n = scores.shape[0]
    row_lse = _logsumexp(scores, axis=1)
    return float((scores.diagonal() - row_lse + math.log(n)).mean())


def uba_from_scores(scores: np.ndarray) -> float:
    """Diagnostic only: plugs the batch log partition straight into the
    unnormalized bound. The plug-in ln of a sample mean is biased, so this
    is neither a lower nor an upper bound; it is exposed for inspecting
    the gap the tangent trick closes."""
    return float(scores.diagonal().mean() - _offdiag_col_logmeanexp(scores).mean())


# ---------------------------------------------------------------------------
# Batch-level estimators
# ---------------------------------------------------------------------------


def est_ba_upper(batch: SampleBatch, cond_ld, marginal_ld) -> float:
    """Mean log ratio of the conditional to the auxiliary marginal.

    With the true marginal this is an unbiased estimate of the exact
    information; any other auxiliary inflates it by a divergence, so in
    expectation it never falls below the truth.
    """
    return float(np.mean(cond_ld(batch.ys, batch.xs) - marginal_ld(batch.ys)))


def est_ba_lower(batch: SampleBatch, decoder: "DecoderParams", entropy_hx: float) -> float:
    """Mean decoder log-likelihood of x given y, plus the known marginal entropy."""
    mean, _ = nets.mlp_forward(decoder.net, batch.ys)
    ll = _gaussian_ll(batch.xs, mean, decoder.log_var)
    return float(ll.mean() + entropy_hx)


def est_l1out(batch: SampleBatch, cond_ld) -> float:
    """Leave-one-out upper bound: each sample's own conditional is dropped
    from the Monte-Carlo marginal in the denominator."""
    n = batch.n
    if n < 2:
        raise ValueError("leave-one-out needs at least two samples")
    table = cond_ld(batch.ys[:, None, :], batch.xs[None, :, :])
    diag = table.diagonal().copy()
    np.fill_diagonal(table, -np.inf)
    denom = _logsumexp(table, axis=1) - math.log(n - 1)
    return float((diag - denom).mean())


def est_dv(batch: SampleBatch, critic: nets.CriticParams) -> float:
    return dv_from_scores(nets.score_matrix(critic, batch))


def est_tuba(batch: SampleBatch, critic: nets.CriticParams,
             baseline: nets.BaselineParams) -> float:
    scores = nets.score_matrix(critic, batch)
    return tuba_from_scores(scores, nets.log_baseline(baseline, batch.ys))


def est_nwj(batch: SampleBatch, critic: nets.CriticParams) -> float:
    return nwj_from_scores(nets.score_matrix(critic, batch))


def est_infonce(batch: SampleBatch, critic: nets.CriticParams) -> float:
    return infonce_from_scores(nets.score_matrix(critic, batch))


def est_uba(batch: SampleBatch, critic: nets.CriticParams) -> float:
    return uba_from_scores(nets.score_matrix(critic, batch))


# ---------------------------------------------------------------------------
# Gradients of each bound with respect to the score matrix
# ---------------------------------------------------------------------------


def _infonce_upstream(scores: np.ndarray) -> np.ndarray:
    n = scores.shape[0]
    softmax = np.exp(scores - _logsumexp(scores, axis=1)[:, None])
    return (np.eye(n) - softmax) / n


def _dv_upstream(scores: np.ndarray) -> np.ndarray:
    n = scores.shape[0]
    masked = scores.copy()
    np.fill_diagonal(masked, -np.inf)
    weights = np.exp(masked - _logsumexp(masked))
    return np.eye(n) / n - weights


def _tuba_upstream(scores: np.ndarray, log_a: np.ndarray):
    """Returns (d value / d scores, d value / d log_a)."""
    n = scores.shape[0]
    with np.errstate(over="ignore"):
        up = -np.exp(scores - log_a[None, :]) / (n * (n - 1))
        dlog_a = (np.exp(_offdiag_col_logmeanexp(scores) - log_a) - 1.0) / n
    np.fill_diagonal(up, 0.0)
    up += np.eye(n) / n
    return up, dlog_a


# ---------------------------------------------------------------------------
# Gaussian decoder for the normalized lower bound
# ---------------------------------------------------------------------------


@dataclass
class DecoderParams:
    """Network predicting the mean of a diagonal Gaussian over the decoded
    variable, with a free per-coordinate log-variance."""

    net: nets.Mlp
    log_var: np.ndarray


def init_decoder(dim: int, hidden, seed: int) -> DecoderParams:
    rng = np.random.default_rng([seed, 2])
    return DecoderParams(nets.init_mlp((dim, *tuple(hidden), dim), rng), np.zeros(dim))


def decoder_mean(decoder: DecoderParams, cond: np.ndarray) -> np.ndarray:
    out, _ = nets.mlp_forward(decoder.net, cond)
    return out


def _gaussian_ll(target: np.ndarray, mean: np.ndarray, log_var: np.ndarray) -> np.ndarray:
    resid = target - mean
    return -0.5 * ((resid * resid) * np.exp(-log_var) + log_var + math.log(2.0 * math.pi)).sum(
        axis=1
    )


def _decoder_params(decoder: DecoderParams) -> list:
    return nets.param_arrays(decoder.net) + [decoder.log_var]


def _decoder_from_params(decoder: DecoderParams, arrays: list) -> DecoderParams:
    return DecoderParams(nets.with_param_arrays(decoder.net, arrays[:-1]), arrays[-1])


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainSettings:
    """Optimizer and architecture knobs shared by every estimator."""

    steps: int = 20000
    batch_size: int = 128
    seed: int = 0
    eval_every: int = 100
    smoothing: float = 0.9
    critic_form: str = "separable"
    hidden: tuple = (64, 64)
    embed: int = 32
    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.steps < 0 or self.batch_size < 2 or self.eval_every < 1:
            raise ValueError("invalid training settings")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


@dataclass
class EstimateTrajectory:
    """Per-evaluation estimates of one run, with full provenance."""

    estimator: str
    records: list  # (step, estimate, smoothed)
    true_mi: float
    seed: int
    config: dict

    def __post_init__(self):
        if not self.records:
            raise ValueError("a trajectory needs at least one record")
        steps = [r[0] for r in self.records]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("record steps must be strictly increasing")
        if not all(math.isfinite(r[1]) and math.isfinite(r[2]) for r in self.records):
            raise ValueError("trajectory estimates must be finite")

    @property
    def untrained_estimate(self) -> float:
        return self.records[0][1]

    @property
    def final_smoothed(self) -> float:
        return self.records[-1][2]


class TrainingDiverged(RuntimeError):
    """Raised when a training objective goes non-finite."""

    def __init__(self, step: int, config: dict):
        super().__init__(f"non-finite objective at step {step}; config={config}")
        self.step = step
        self.config = config


def _run_config(kind: EstimatorKind, task: GaussianTask, settings: TrainSettings) -> dict:
    config = {"estimator": kind.value, "dim": task.dim, "rho": task.rho,
              "true_mi": true_mi(task)}
    config.update(asdict(settings))
    return config


def train_estimator(kind, task: GaussianTask, settings: TrainSettings,
                    return_components: bool = False):
    """Optimize one estimator on a task; returns the evaluation trajectory.

    Lower bounds are ascended, the tractable upper bounds have nothing to
    train and are simply evaluated on the same schedule. Held-out batches
    are drawn every `eval_every` steps (plus once before any training);
    training and evaluation use disjoint Philox streams, so a trajectory is
    bit-reproducible from (config, seed) alone. Components are not
    persisted anywhere: pass `return_components=True` to additionally get
    the trained critic/baseline/decoder for further evaluation, or simply
    retrain from the seed.
    """
    kind = EstimatorKind(kind) if not isinstance(kind, EstimatorKind) else kind
    config = _run_config(kind, task, settings)
    bs = settings.batch_size
    seed = settings.seed

    h_x = marginal_entropy(task)
    critic = baseline = decoder = None
    params = []
    if kind in (EstimatorKind.DV, EstimatorKind.NWJ, EstimatorKind.INFONCE, EstimatorKind.TUBA):
        arch = nets.CriticArch(task.dim, task.dim, form=settings.critic_form,
                               hidden=settings.hidden, embed=settings.embed)
        critic = nets.init_critic(arch, seed)
        params = nets.param_arrays(critic)
        if kind is EstimatorKind.TUBA:
            baseline = nets.init_baseline(task.dim, settings.hidden, seed)
            params = params + nets.param_arrays(baseline)
    elif kind is EstimatorKind.BA_LOWER:
        decoder = init_decoder(task.dim, settings.hidden, seed)
        params = _decoder_params(decoder)

    def evaluate(batch: SampleBatch) -> float:
        if kind is EstimatorKind.BA_UPPER_R:
            return est_ba_upper(
                batch,
                lambda y, x: cond_log_density(task, y, x),
                lambda y: marginal_log_density(task, y),
            )
        if kind is EstimatorKind.L1OUT:
            return est_l1out(batch, lambda y, x: cond_log_density(task, y, x))
        if kind is EstimatorKind.BA_LOWER:
            return est_ba_lower(batch, decoder, h_x)
        if kind is EstimatorKind.DV:
            return est_dv(batch, critic)
        if kind is EstimatorKind.TUBA:
            return est_tuba(batch, critic, baseline)
        if kind is EstimatorKind.NWJ:
            return est_nwj(batch, critic)
        return est_infonce(batch, critic)

    def ascent_grads(batch: SampleBatch, step: int):
        """(objective value, gradient list aligned with `params`).

        Raises before touching gradients if the objective went non-finite,
        so a diverged run aborts with its step index and config snapshot.
        """
        if kind is EstimatorKind.BA_LOWER:
            mean, cache = nets.mlp_forward(decoder.net, batch.ys)
            resid = batch.xs - mean
            inv_var = np.exp(-decoder.log_var)
            value = float(
                -0.5 * ((resid * resid) * inv_var + decoder.log_var
                        + math.log(2.0 * math.pi)).sum(axis=1).mean()
                + h_x
            )
            if not math.isfinite(value):
                raise TrainingDiverged(step, config)
            dmean = resid * inv_var / bs
            dw, db = nets.mlp_backward(decoder.net, cache, dmean)
            dlog_var = 0.5 * ((resid * resid) * inv_var - 1.0).sum(axis=0) / bs
            return value, nets._interleave(dw, db) + [dlog_var]

        scores, cache = nets.score_matrix_with_cache(critic, batch)
        if kind is EstimatorKind.TUBA:
            log_a = nets.log_baseline(baseline, batch.ys)
            value = tuba_from_scores(scores, log_a)
            if not math.isfinite(value):
                raise TrainingDiverged(step, config)
            upstream, dlog_a = _tuba_upstream(scores, log_a)
            grads = nets.backward_from_cache(critic, cache, upstream)
            grads += nets.baseline_backward(baseline, batch.ys, dlog_a)
            return value, grads
        if kind is EstimatorKind.INFONCE:
            value = infonce_from_scores(scores)
        elif kind is EstimatorKind.DV:
            value = dv_from_scores(scores)
        else:  # NWJ
            value = tuba_from_scores(scores, np.ones(bs))
        if not math.isfinite(value):
            raise TrainingDiverged(step, config)
        if kind is EstimatorKind.INFONCE:
            upstream = _infonce_upstream(scores)
        elif kind is EstimatorKind.DV:
            upstream = _dv_upstream(scores)
        else:
            upstream, _ = _tuba_upstream(scores, np.ones(bs))
        return value, nets.backward_from_cache(critic, cache, upstream)

    records = []
    smoothed = None

    def record(step: int):
        nonlocal smoothed
        eval_index = len(records)
        batch = sample(task, bs, seed, stream=2 * eval_index + 1)
        value = evaluate(batch)
        smoothed = value if smoothed is None else (
            settings.smoothing * smoothed + (1.0 - settings.smoothing) * value
        )
        records.append((step, value, smoothed))

    record(0)
    if kind.needs_training:
        shapes = [p.shape for p in params]
        sizes = [p.size for p in params]
        offsets = [0]
        for size in sizes:
            offsets.append(offsets[-1] + size)
        n_critic = len(nets.param_arrays(critic)) if critic is not None else 0

        def rebind(flat_vector: np.ndarray):
            nonlocal critic, baseline, decoder
            arrays = [
                flat_vector[o:o + size].reshape(shape)
                for o, size, shape in zip(offsets, sizes, shapes)
            ]
            if critic is not None:
                critic = nets.with_param_arrays(critic, arrays[:n_critic])
                if baseline is not None:
                    baseline = nets.with_param_arrays(baseline, arrays[n_critic:])
            else:
                decoder = _decoder_from_params(decoder, arrays)

        # a single flat vector keeps the optimizer to a handful of array ops
        # per step regardless of how many layers the components have
        flat = np.concatenate([p.ravel() for p in params])
        rebind(flat)
        adam = nets.init_adam([flat], lr=settings.lr, beta1=settings.beta1,
                              beta2=settings.beta2, eps=settings.eps)
        for t in range(settings.steps):
            batch = sample(task, bs, seed, stream=2 * t + 2)
            _, grads = ascent_grads(batch, t)
            flat_grad = np.concatenate([np.ravel(g) for g in grads])
            # Adam descends, the bounds are maximized
            adam, (flat,) = nets.adam_step(adam, [flat], [-flat_grad])
            rebind(flat)
            if (t + 1) % settings.eval_every == 0:
                record(t + 1)
    else:
        for t in range(settings.steps):
            if (t + 1) % settings.eval_every == 0:
                record(t + 1)

    trajectory = EstimateTrajectory(
        estimator=kind.value,
        records=records,
        true_mi=true_mi(task),
        seed=seed,
        config=config,
    )
    if return_components:
        return trajectory, {"critic": critic, "baseline": baseline, "decoder": decoder}
    return trajectory


# ---------------------------------------------------------------------------
# Trajectory CSV format: step,estimate,smoothed,true_mi,estimator,seed with
# nine significant digits
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    return format(value, ".9g")


def trajectory_csv_text(traj: EstimateTrajectory) -> str:
    lines = ["step,estimate,smoothed,true_mi,estimator,seed"]
    for step, estimate, smoothed in traj.records:
        lines.append(
            f"{step},{_fmt(estimate)},{_fmt(smoothed)},{_fmt(traj.true_mi)},"
            f"{traj.estimator},{traj.seed}"
        )
    return "\n".join(lines) + "\n"


def trajectory_filename(traj: EstimateTrajectory) -> str:
    dim = traj.config["dim"]
    return f"{traj.estimator}_{dim}_{traj.true_mi:g}_{traj.seed}.csv"

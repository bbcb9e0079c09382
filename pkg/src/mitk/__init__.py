"""mitk: mutual-information toolkit.

Exact information-theoretic quantities on finite alphabets, executable
probes for the classical identities and inequalities behind variational
information estimation, correlated-Gaussian benchmark tasks with
closed-form ground truth, and the variational estimator ladder (auxiliary
marginal, leave-one-out, decoder, DV, TUBA, NWJ, InfoNCE) with a small
trainable critic.
"""

from .discrete import (
    CondPmf,
    JointPmf2,
    JointPmf3,
    Pmf,
    conditional_entropy,
    conditional_kl,
    conditional_mutual_information,
    entropy,
    f_divergence,
    joint_entropy,
    js_divergence,
    kl_divergence,
    mi_chain_rule_terms,
    mutual_information,
    total_variation,
)
from .estimators import (
    EstimateTrajectory,
    EstimatorKind,
    TrainSettings,
    est_ba_lower,
    est_ba_upper,
    est_dv,
    est_infonce,
    est_l1out,
    est_nwj,
    est_tuba,
    train_estimator,
)
from .gaussian import GaussianTask, SampleBatch, sample, task_for_target_mi, true_mi
from .variational import (
    MarkovChainSpec,
    Partition,
    dpi_check,
    dv_supremum,
    dv_value,
    golden_decomposition,
    gyp_mi_supremum,
    gyp_supremum,
    markov_joint,
    product_distance_minimize,
    run_probe_suite,
)

__version__ = "0.1.0"

"""Exact entropy, divergence, and mutual-information computations on finite alphabets.

All quantities are in nats. Sums are accumulated with compensated (exact)
summation, so the classical identities hold to within a few ulp instead of
accumulating O(cells) rounding error, and results are independent of
traversal order. Probability tables are validated at construction and are
never renormalized silently: a caller that wants a normalized table must
normalize it first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import rel_entr, xlogy

MASS_ATOL = 1e-12

__all__ = [
    "MASS_ATOL",
    "Pmf",
    "JointPmf2",
    "JointPmf3",
    "CondPmf",
    "entropy",
    "joint_entropy",
    "conditional_entropy",
    "kl_divergence",
    "conditional_kl",
    "f_divergence",
    "f_kl",
    "f_tv",
    "f_js",
    "js_divergence",
    "total_variation",
    "mutual_information",
    "mi_from_divergence",
    "mi_from_entropies",
    "conditional_mutual_information",
    "mi_chain_rule_terms",
    "joint_from_factors",
    "random_pmf",
    "random_joint2",
    "random_joint3",
    "random_cond",
    "format_joint_table",
    "parse_joint_table",
]


def _exact_sum(values) -> float:
    """Correctly rounded sum, order independent (math.fsum)."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def _clip_residue(value: float) -> float:
    """Zero out tiny negative rounding residue of a provably nonnegative quantity."""
    if -MASS_ATOL < value < 0.0:
        return 0.0
    return value


def _frozen_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{what} must be nonempty")
    if np.any(arr < 0):
        raise ValueError(f"{what} entries must be nonnegative")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} entries must be finite")
    arr.setflags(write=False)
    return arr


def _check_mass(arr: np.ndarray, what: str) -> None:
    total = _exact_sum(arr)
    if abs(total - 1.0) > MASS_ATOL:
        raise ValueError(f"{what} must sum to 1 within {MASS_ATOL}, got {total!r}")


def _check_labels(labels: tuple, what: str) -> None:
    if len(set(labels)) != len(labels):
        raise ValueError(f"{what} labels must be unique")


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability mass function over a finite, ordered, labeled alphabet."""

    alphabet: tuple
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        probs = _frozen_array(self.probs, 1, "Pmf probs")
        if len(self.alphabet) != probs.shape[0]:
            raise ValueError("alphabet and probs must have equal length")
        _check_labels(self.alphabet, "Pmf")
        _check_mass(probs, "Pmf probs")
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return len(self.alphabet)


@dataclass(frozen=True, eq=False)
class JointPmf2:
    """Joint probability table over two labeled alphabets (rows x columns)."""

    row_alphabet: tuple
    col_alphabet: tuple
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row_alphabet", tuple(self.row_alphabet))
        object.__setattr__(self, "col_alphabet", tuple(self.col_alphabet))
        probs = _frozen_array(self.probs, 2, "JointPmf2 probs")
        if probs.shape != (len(self.row_alphabet), len(self.col_alphabet)):
            raise ValueError("probs shape must match alphabet lengths")
        _check_labels(self.row_alphabet, "JointPmf2 row")
        _check_labels(self.col_alphabet, "JointPmf2 col")
        _check_mass(probs, "JointPmf2 probs")
        object.__setattr__(self, "probs", probs)

    def marginal(self, axis: int) -> Pmf:
        """Marginal Pmf of the variable living on `axis` (0 = rows, 1 = cols)."""
        if axis not in (0, 1):
            raise ValueError("axis must be 0 or 1")
        labels = self.row_alphabet if axis == 0 else self.col_alphabet
        return Pmf(labels, self.probs.sum(axis=1 - axis))

    def transpose(self) -> "JointPmf2":
        return JointPmf2(self.col_alphabet, self.row_alphabet, self.probs.T)


@dataclass(frozen=True, eq=False)
class JointPmf3:
    """Joint probability table over three labeled alphabets."""

    alphabets: tuple
    probs: np.ndarray

    def __post_init__(self):
        alphabets = tuple(tuple(a) for a in self.alphabets)
        if len(alphabets) != 3:
            raise ValueError("JointPmf3 needs exactly three alphabets")
        object.__setattr__(self, "alphabets", alphabets)
        probs = _frozen_array(self.probs, 3, "JointPmf3 probs")
        if probs.shape != tuple(len(a) for a in alphabets):
            raise ValueError("probs shape must match alphabet lengths")
        for a in alphabets:
            _check_labels(a, "JointPmf3")
        _check_mass(probs, "JointPmf3 probs")
        object.__setattr__(self, "probs", probs)

    def pair_marginal(self, axis_a: int, axis_b: int) -> JointPmf2:
        """2-D marginal over the ordered axis pair (axis_a, axis_b)."""
        if axis_a == axis_b or not {axis_a, axis_b} <= {0, 1, 2}:
            raise ValueError("need two distinct axes in {0, 1, 2}")
        drop = ({0, 1, 2} - {axis_a, axis_b}).pop()
        table = self.probs.sum(axis=drop)
        if axis_a > axis_b:
            table = table.T
        return JointPmf2(self.alphabets[axis_a], self.alphabets[axis_b], table)


@dataclass(frozen=True, eq=False)
class CondPmf:
    """Conditional table: one Pmf row over the target alphabet per given symbol."""

    given_alphabet: tuple
    target_alphabet: tuple
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "given_alphabet", tuple(self.given_alphabet))
        object.__setattr__(self, "target_alphabet", tuple(self.target_alphabet))
        probs = _frozen_array(self.probs, 2, "CondPmf probs")
        if probs.shape != (len(self.given_alphabet), len(self.target_alphabet)):
            raise ValueError("probs shape must match alphabet lengths")
        _check_labels(self.given_alphabet, "CondPmf given")
        _check_labels(self.target_alphabet, "CondPmf target")
        for i in range(probs.shape[0]):
            row_total = _exact_sum(probs[i])
            if abs(row_total - 1.0) > MASS_ATOL:
                raise ValueError(
                    f"CondPmf row {self.given_alphabet[i]!r} sums to {row_total!r}, not 1"
                )
        object.__setattr__(self, "probs", probs)


def joint_from_factors(px: Pmf, channel: CondPmf) -> JointPmf2:
    """Materialize P(x, y) = P(x) * P(y|x)."""
    if px.alphabet != channel.given_alphabet:
        raise ValueError("channel given-alphabet must match px alphabet")
    return JointPmf2(px.alphabet, channel.target_alphabet, px.probs[:, None] * channel.probs)


# ---------------------------------------------------------------------------
# Entropies
# ---------------------------------------------------------------------------


def entropy(p: Pmf) -> float:
    """Shannon entropy -sum p ln p in nats, with 0 ln 0 = 0."""
    return -_exact_sum(xlogy(p.probs, p.probs))


def joint_entropy(j: JointPmf2) -> float:
    """Entropy of the joint table, -sum p(x,y) ln p(x,y)."""
    return -_exact_sum(xlogy(j.probs, j.probs))


def conditional_entropy(j: JointPmf2, given: int) -> float:
    """H(target | given variable), where `given` selects axis 0 (rows) or 1 (cols).

    Computed as H(joint) - H(given marginal); zero-mass given symbols
    contribute nothing. Always nonnegative and at most the target's
    marginal entropy.
    """
    h = joint_entropy(j) - entropy(j.marginal(given))
    return _clip_residue(h)


def _axes_entropy(table: np.ndarray, keep: tuple) -> float:
    """Entropy of the marginal of `table` over the (sorted) axes in `keep`."""
    drop = tuple(sorted(set(range(table.ndim)) - set(keep)))
    marg = table.sum(axis=drop) if drop else table
    return -_exact_sum(xlogy(marg, marg))


# ---------------------------------------------------------------------------
# Divergences
# ---------------------------------------------------------------------------


def kl_divergence(p: Pmf, q: Pmf) -> float:
    """D(p || q) = sum p ln(p/q) in nats.

    Conventions: 0 ln(0/q) = 0, and the result is +inf as soon as some
    symbol has p > 0 with q = 0. Never negative.
    """
    if p.alphabet != q.alphabet:
        raise ValueError("kl_divergence requires identical alphabets")
    return _clip_residue(_exact_sum(rel_entr(p.probs, q.probs)))


def conditional_kl(p: CondPmf, q: CondPmf, weights: Pmf) -> float:
    """Expected per-row KL divergence, sum_x w(x) D(p(.|x) || q(.|x)).

    Infinity from any positively weighted row propagates.
    """
    if p.given_alphabet != q.given_alphabet or p.target_alphabet != q.target_alphabet:
        raise ValueError("conditional_kl requires matching alphabets")
    if weights.alphabet != p.given_alphabet:
        raise ValueError("weights must cover the given-alphabet")
    terms = []
    for i, w in enumerate(weights.probs):
        if w == 0.0:
            continue
        row_kl = _clip_residue(_exact_sum(rel_entr(p.probs[i], q.probs[i])))
        if math.isinf(row_kl):
            return math.inf
        terms.append(w * row_kl)
    return _clip_residue(math.fsum(terms))


def f_divergence(f, p: Pmf, q: Pmf, slope_at_inf: float = math.inf) -> float:
    """Generalized divergence sum_x q(x) f(p(x)/q(x)) for convex f with f(1) = 0.

    Zero-mass conventions: cells with p = q = 0 contribute 0; cells with
    p > 0, q = 0 contribute p * slope_at_inf, the limit of f(t)/t. The
    default slope (+inf) matches superlinear f such as t ln t; bounded
    instances like total variation pass their finite slope.
    """
    if p.alphabet != q.alphabet:
        raise ValueError("f_divergence requires identical alphabets")
    terms = []
    for pi, qi in zip(p.probs, q.probs):
        if qi > 0.0:
            terms.append(qi * f(pi / qi))
        elif pi > 0.0:
            if math.isinf(slope_at_inf):
                return math.inf
            terms.append(pi * slope_at_inf)
    return math.fsum(terms)


def f_kl(t: float) -> float:
    """t ln t, the convex generator of KL divergence (0 at t = 0)."""
    return float(xlogy(t, t))


def f_tv(t: float) -> float:
    """|t - 1| / 2, the convex generator of total variation."""
    return 0.5 * abs(t - 1.0)


def f_js(t: float) -> float:
    """Convex generator of the two-sided divergence to the midpoint mixture."""
    if t == 0.0:
        return math.log(2.0)
    return float(xlogy(t, 2.0 * t / (1.0 + t))) + math.log(2.0 / (1.0 + t))


def js_divergence(p: Pmf, q: Pmf) -> float:
    """D(p || m) + D(q || m) with m the midpoint mixture of p and q."""
    if p.alphabet != q.alphabet:
        raise ValueError("js_divergence requires identical alphabets")
    m = 0.5 * (p.probs + q.probs)
    return _clip_residue(
        _exact_sum(rel_entr(p.probs, m)) + _exact_sum(rel_entr(q.probs, m))
    )


def total_variation(p: Pmf, q: Pmf) -> float:
    """Half the L1 distance between the tables."""
    if p.alphabet != q.alphabet:
        raise ValueError("total_variation requires identical alphabets")
    return 0.5 * _exact_sum(np.abs(p.probs - q.probs))


# ---------------------------------------------------------------------------
# Mutual information
# ---------------------------------------------------------------------------


def mutual_information(j: JointPmf2) -> float:
    """I(X;Y) in nats, by direct summation of p(x,y) ln[p(x,y) / (p(x)p(y))]."""
    px = j.probs.sum(axis=1)
    py = j.probs.sum(axis=0)
    return _clip_residue(_exact_sum(rel_entr(j.probs, np.outer(px, py))))


def mi_from_divergence(j: JointPmf2) -> float:
    """I(X;Y) as the KL divergence between the joint and the product of marginals."""
    px = j.probs.sum(axis=1)
    py = j.probs.sum(axis=0)
    pairs = tuple((r, c) for r in j.row_alphabet for c in j.col_alphabet)
    joint = Pmf(pairs, j.probs.ravel())
    product = Pmf(pairs, np.outer(px, py).ravel())
    return kl_divergence(joint, product)


def mi_from_entropies(j: JointPmf2) -> float:
    """I(X;Y) as H(X) + H(Y) - H(X,Y)."""
    return _clip_residue(
        entropy(j.marginal(0)) + entropy(j.marginal(1)) - joint_entropy(j)
    )


def conditional_mutual_information(j: JointPmf3, conditioning: int) -> float:
    """I(A;B | C) where C is the variable on the `conditioning` axis.

    Computed as H(A,C) + H(B,C) - H(A,B,C) - H(C); always nonnegative.
    """
    if conditioning not in (0, 1, 2):
        raise ValueError("conditioning axis must be 0, 1, or 2")
    a, b = sorted({0, 1, 2} - {conditioning})
    c = conditioning
    t = j.probs
    v = (
        _axes_entropy(t, tuple(sorted((a, c))))
        + _axes_entropy(t, tuple(sorted((b, c))))
        - _axes_entropy(t, (0, 1, 2))
        - _axes_entropy(t, (c,))
    )
    return _clip_residue(v)


def mi_chain_rule_terms(table: np.ndarray) -> list:
    """Chain-rule decomposition of I(X_1..X_n; Y) for a joint table.

    `table` is an (n+1)-dimensional probability table whose last axis is Y.
    Term i is I(X_i; Y | X_(i-1), ..., X_1); the terms sum to the total
    information between (X_1..X_n) jointly and Y. Limited to n <= 4.
    """
    t = np.asarray(table, dtype=float)
    n = t.ndim - 1
    if n < 1:
        raise ValueError("table must have at least two axes (one X plus Y)")
    if n > 4:
        raise ValueError(f"at most 4 conditioned variables supported, got {n}")
    if np.any(t < 0):
        raise ValueError("table entries must be nonnegative")
    total = _exact_sum(t)
    if abs(total - 1.0) > MASS_ATOL:
        raise ValueError(f"table must sum to 1 within {MASS_ATOL}, got {total!r}")

    y_axis = n
    terms = []
    for i in range(n):
        prefix = tuple(range(i))
        h_prefix_i = _axes_entropy(t, prefix + (i,))
        h_prefix_y = _axes_entropy(t, prefix + (y_axis,))
        h_prefix_iy = _axes_entropy(t, prefix + (i, y_axis))
        h_prefix = _axes_entropy(t, prefix) if prefix else 0.0
        terms.append(_clip_residue(h_prefix_i + h_prefix_y - h_prefix_iy - h_prefix))
    return terms


# ---------------------------------------------------------------------------
# Random tables for property tests (exponential draws, normalized:
# full support with probability one, so infinity branches are only hit
# when constructed deliberately)
# ---------------------------------------------------------------------------


def _normalized(rng, shape, uniform_mix: float = 0.0) -> np.ndarray:
    raw = rng.exponential(size=shape)
    table = raw / raw.sum()
    if uniform_mix:
        table = (1.0 - uniform_mix) * table + uniform_mix / table.size
    return table


def random_pmf(rng, n: int, labels=None, uniform_mix: float = 0.0) -> Pmf:
    if labels is None:
        labels = tuple(f"s{i}" for i in range(n))
    return Pmf(labels, _normalized(rng, n, uniform_mix))


def random_joint2(rng, n_rows: int, n_cols: int) -> JointPmf2:
    rows = tuple(f"r{i}" for i in range(n_rows))
    cols = tuple(f"c{i}" for i in range(n_cols))
    return JointPmf2(rows, cols, _normalized(rng, (n_rows, n_cols)))


def random_joint3(rng, n0: int, n1: int, n2: int) -> JointPmf3:
    alphabets = (
        tuple(f"x{i}" for i in range(n0)),
        tuple(f"y{i}" for i in range(n1)),
        tuple(f"z{i}" for i in range(n2)),
    )
    return JointPmf3(alphabets, _normalized(rng, (n0, n1, n2)))


def random_cond(rng, n_given: int, n_target: int) -> CondPmf:
    raw = rng.exponential(size=(n_given, n_target))
    rows = raw / raw.sum(axis=1, keepdims=True)
    given = tuple(f"g{i}" for i in range(n_given))
    target = tuple(f"t{i}" for i in range(n_target))
    return CondPmf(given, target, rows)


# ---------------------------------------------------------------------------
# Plain-text table format: header of column labels, then one line per row
# beginning with the row label, entries as decimal reals
# ---------------------------------------------------------------------------


def format_joint_table(j: JointPmf2) -> str:
    for label in j.row_alphabet + j.col_alphabet:
        if any(ch.isspace() for ch in str(label)):
            raise ValueError(f"label {label!r} contains whitespace, cannot serialize")
    lines = [" ".join(str(c) for c in j.col_alphabet)]
    for label, row in zip(j.row_alphabet, j.probs):
        lines.append(str(label) + " " + " ".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def parse_joint_table(text: str) -> JointPmf2:
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise ValueError("table text needs a header line and at least one row")
    cols = tuple(lines[0].split())
    rows = []
    table = []
    for line in lines[1:]:
        fields = line.split()
        if len(fields) != len(cols) + 1:
            raise ValueError(f"row {fields[0]!r} has {len(fields) - 1} entries, expected {len(cols)}")
        rows.append(fields[0])
        table.append([float(v) for v in fields[1:]])
    return JointPmf2(tuple(rows), cols, np.array(table))

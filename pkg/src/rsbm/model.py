"""Parameters of the regular stochastic block model and closed-form quantities.

Everything here is a pure function of the degrees ``(d1, d2)`` (and ``n``
where relevant). Integer sequences use Python integers, so ``z_k`` never
overflows; closed forms that need floating point (the characteristic roots,
the total-variation decay rates) are evaluated in a way that stays finite for
any degree pair that fits in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ValidationError

__all__ = [
    "RsbmParams",
    "DerivedQuantities",
    "check_degrees",
    "check_thresholds",
    "z_sequence",
    "z_closed_form",
    "predicted_saw_eigenvalue1",
    "tv_rates",
    "default_saw_depth",
]


def check_degrees(d1, d2):
    """Validate a degree pair and return it as ``(int, int)``."""
    for name, d in (("d1", d1), ("d2", d2)):
        if isinstance(d, bool) or int(d) != d:
            raise ValidationError(f"{name} must be an integer, got {d!r}")
        if d < 1:
            raise ValidationError(f"positive-degree invariant violated: {name}={d} < 1")
    return int(d1), int(d2)


@dataclass(frozen=True)
class RsbmParams:
    """Size and degrees of an RSBM instance on ``2 * n`` vertices.

    ``d1`` is the degree inside each community and ``d2`` the number of
    neighbours on the other side. Construction raises ``ValidationError``
    naming the first violated invariant.

    The theory assumes ``min(d1, d2) >= 3``; that is reported by
    :attr:`meets_standing_assumption` rather than enforced, because small
    cross degrees are useful in experiments and tests.
    """

    n: int
    d1: int
    d2: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"positive-size invariant violated: n={self.n!r}")
        check_degrees(self.d1, self.d2)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "d1", int(self.d1))
        object.__setattr__(self, "d2", int(self.d2))
        if (self.n * self.d1) % 2:
            raise ValidationError(
                f"parity invariant violated: n*d1 = {self.n * self.d1} is odd"
            )
        if self.d1 >= self.n:
            raise ValidationError(
                f"simple-graph invariant violated: d1={self.d1} must be < n={self.n}"
            )
        if self.d2 > self.n:
            raise ValidationError(
                f"bipartite invariant violated: d2={self.d2} must be <= n={self.n}"
            )

    @property
    def num_vertices(self):
        return 2 * self.n

    @property
    def degree(self):
        return self.d1 + self.d2

    @property
    def meets_standing_assumption(self):
        return min(self.d1, self.d2) >= 3

    def derived(self):
        return check_thresholds(self.d1, self.d2)

    def to_dict(self):
        return {"n": self.n, "d1": self.d1, "d2": self.d2}


@dataclass(frozen=True)
class DerivedQuantities:
    """Thresholds, characteristic roots and rates for a degree pair.

    ``alpha``, ``beta``, ``A_const`` and ``B_const`` are ``None`` when the
    spectral condition fails (the characteristic roots are then not real and
    distinct).
    """

    d1: int
    d2: int
    spectral_condition: bool
    majority_condition: bool
    alpha: float | None
    beta: float | None
    A_const: float | None
    B_const: float | None
    tv_rate1: float
    tv_rate2: float

    def z(self, l):
        return z_sequence(self.d1, self.d2, l)[-1]

    def z_closed(self, l):
        return z_closed_form(self, l)

    def lambda1_saw(self, l):
        return predicted_saw_eigenvalue1(self.d1, self.d2, l)

    def to_dict(self):
        return {
            "d1": self.d1,
            "d2": self.d2,
            "spectral_condition": self.spectral_condition,
            "majority_condition": self.majority_condition,
            "alpha": self.alpha,
            "beta": self.beta,
            "A_const": self.A_const,
            "B_const": self.B_const,
            "tv_rate1": self.tv_rate1,
            "tv_rate2": self.tv_rate2,
        }


def check_thresholds(d1, d2):
    """Evaluate the recovery thresholds and the roots of
    ``x**2 - (d1 - d2) x + (d1 + d2 - 1)``.

    >>> q = check_thresholds(10, 2)
    >>> q.spectral_condition, q.majority_condition, round(q.alpha, 5)
    (True, True, 6.23607)
    """
    d1, d2 = check_degrees(d1, d2)
    s = d1 - d2
    p = d1 + d2 - 1
    disc = s * s - 4 * p
    spectral = disc > 0
    alpha = beta = a_const = b_const = None
    if spectral:
        root = math.sqrt(disc)
        alpha = (s + root) / 2
        # p / alpha avoids cancellation in (s - root) / 2
        beta = p / alpha
        z1, z2 = s, s * s - (d1 + d2)
        a_const = (z2 - beta * z1) / (alpha * (alpha - beta))
        b_const = (alpha * z1 - z2) / (beta * (alpha - beta))
    rate1, rate2 = tv_rates(d1, d2)
    return DerivedQuantities(
        d1=d1,
        d2=d2,
        spectral_condition=spectral,
        majority_condition=d1 > d2 + 4,
        alpha=alpha,
        beta=beta,
        A_const=a_const,
        B_const=b_const,
        tv_rate1=rate1,
        tv_rate2=rate2,
    )


def z_sequence(d1, d2, l):
    """Return ``[z_1, ..., z_l]`` in exact integer arithmetic.

    ``z_k`` is the number of same-label minus opposite-label vertices at
    distance ``k`` from the root of the labelled ``(d1 + d2)``-regular tree.
    The first two terms come from their explicit formulas; the linear
    recurrence is only applied from ``k = 3`` on.
    """
    d1, d2 = check_degrees(d1, d2)
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise ValidationError(f"empty range: l must be a positive integer, got {l!r}")
    s = d1 - d2
    p = d1 + d2 - 1
    z = [s, s * s - (d1 + d2)]
    for _ in range(3, int(l) + 1):
        z.append(s * z[-1] - p * z[-2])
    return z[: int(l)]


def z_closed_form(quantities, l):
    """``A_const * alpha**l + B_const * beta**l`` as a float."""
    if not quantities.spectral_condition:
        raise ValidationError("closed form needs distinct real roots (spectral condition)")
    return quantities.A_const * quantities.alpha**l + quantities.B_const * quantities.beta**l


def predicted_saw_eigenvalue1(d1, d2, l):
    """Boundary size of a radius-``l`` ball in the ``(d1 + d2)``-regular tree."""
    d1, d2 = check_degrees(d1, d2)
    if isinstance(l, bool) or int(l) != l or l < 1:
        raise ValidationError(f"l must be a positive integer, got {l!r}")
    d = d1 + d2
    return d * (d - 1) ** (int(l) - 1)


def tv_rates(d1, d2):
    """Per-vertex decay rates of the probability that a uniform
    ``(d1 + d2)``-regular graph lies in the RSBM support.

    Returns ``(2 C(d, d1) / 2**d, 2 C(d, d1) d1**d1 d2**d2 / d**d)`` with
    ``d = d1 + d2``, evaluated through logarithms.
    """
    d1, d2 = check_degrees(d1, d2)
    d = d1 + d2
    log_binom = math.log(math.comb(d, d1))
    log_rate1 = math.log(2) + log_binom - d * math.log(2)
    log_rate2 = (
        math.log(2) + log_binom + d1 * math.log(d1) + d2 * math.log(d2) - d * math.log(d)
    )
    return math.exp(log_rate1), math.exp(log_rate2)


def default_saw_depth(n, d1, d2):
    """Largest ``l >= 1`` with ``l * ln(d1 + d2) < ln(2n) / 4`` (1 if none)."""
    d1, d2 = check_degrees(d1, d2)
    bound = math.log(2 * n) / 4
    l = 1
    while (l + 1) * math.log(d1 + d2) < bound:
        l += 1
    return l

"""Closed-form success bounds and regime checks for hypothesis separation.

Pure float arithmetic, natural logarithms throughout, ``math.e`` at full
float precision. Reported probabilities are clamped to [0, 1] with the
raw value retained alongside, because the raw value is what monotonicity
and sandwich identities are checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .sampler import fold_noise


class Inapplicable:
    """Sentinel: the bound's validity precondition fails for these inputs."""

    _instance = None

    def __new__(cls) -> "Inapplicable":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INAPPLICABLE"

    def __reduce__(self):
        return (Inapplicable, ())


INAPPLICABLE = Inapplicable()


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _check_common(lam: int, *probs: float) -> None:
    if lam < 1:
        raise ValueError(f"lam must be at least 1, got {lam}")
    for v in probs:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"probability {v!r} outside [0, 1]")


def lb_connected(d: int, lam: int, p_plus: float, eps_plus: float, eps_minus: float) -> float:
    """Lower bound on answering H1 when the pair is at distance d.

    The first factor is cluster survival (each of the d+1 clusters on the
    path must be internally connected), the second is per-hop linkage
    (some of the lam^2 slots over each path edge must fire).
    """
    if d < 1:
        raise ValueError(f"distance must be positive, got {d}")
    _check_common(lam, p_plus, eps_plus, eps_minus)
    p_eff = fold_noise(p_plus, eps_minus)
    cluster = max(0.0, 1.0 - 2.0 * math.e**3 * eps_plus ** (lam / 2.0))
    hop = 1.0 - (1.0 - p_eff) ** (lam * lam)
    return _clamp01(cluster ** (d + 1) * hop**d)


def ub_disconnected_raw(n: int, lam: int, p_minus: float, eps_minus: float, ball_d: int) -> float:
    """The 2en(lam*B)^2*q expression without its validity check."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    if ball_d < 1:
        raise ValueError(f"ball bound must be positive, got {ball_d}")
    _check_common(lam, p_minus, eps_minus)
    q = fold_noise(p_minus, eps_minus)
    return 2.0 * math.e * n * (lam * ball_d) ** 2 * q


def ub_disconnected(
    n: int, lam: int, p_minus: float, eps_minus: float, ball_d: int
) -> float | Inapplicable:
    """Upper bound on answering H1 when the pair is disconnected.

    Valid only while (lam*B(d))^2 * (p_minus + eps_minus fold) stays at or
    below 1/(2en); outside that regime returns INAPPLICABLE rather than a
    number that bounds nothing.
    """
    raw = ub_disconnected_raw(n, lam, p_minus, eps_minus, ball_d)
    q = fold_noise(p_minus, eps_minus)
    if (lam * ball_d) ** 2 * q > 1.0 / (2.0 * math.e * n):
        return INAPPLICABLE
    return _clamp01(raw)


def gamma_star_raw(
    n: int,
    d: int,
    lam: int,
    p_plus: float,
    p_minus: float,
    eps_plus: float,
    eps_minus: float,
    ball_d: int,
    folded: bool = True,
) -> float:
    """Separation target before clamping: lower bound minus noise penalty.

    ``folded=True`` charges the penalty at p_minus folded with eps_minus,
    matching the bound pair above; ``folded=False`` keeps the bare
    p_minus penalty form.
    """
    if ball_d < 1:
        raise ValueError(f"ball bound must be positive, got {ball_d}")
    lb = lb_connected(d, lam, p_plus, eps_plus, eps_minus)
    q = fold_noise(p_minus, eps_minus) if folded else p_minus
    penalty = 2.0 * math.e * n * (lam * ball_d) ** 2 * q
    return lb - penalty


def gamma_star(
    n: int,
    d: int,
    lam: int,
    p_plus: float,
    p_minus: float,
    eps_plus: float,
    eps_minus: float,
    ball_d: int,
    folded: bool = True,
) -> float:
    """Guaranteed separation level, floored at zero."""
    return max(
        0.0,
        gamma_star_raw(n, d, lam, p_plus, p_minus, eps_plus, eps_minus, ball_d, folded),
    )


class GilbertBounds(NamedTuple):
    exact: float
    corollary: float


def gilbert_bounds(n: int, p: float) -> GilbertBounds:
    """Lower bounds on the connectivity probability of G(n, p).

    ``exact`` is the recursive-formula bound, ``corollary`` the loosened
    1 - 2e^3 q^(n/2) form (meaningful only for q <= 1/2). Both clamped to
    [0, 1]; a single node counts as connected.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    if n == 1:
        return GilbertBounds(1.0, 1.0)
    q = 1.0 - p
    half = q ** ((n - 2) / 2.0)
    grown = (1.0 + half) ** (n - 1)
    bracket = q ** (n - 1) * (grown - q ** ((n - 2) * (n - 1) / 2.0))
    bracket += q ** (n / 2.0) * (grown - 1.0)
    exact = _clamp01(1.0 - bracket)
    corollary = _clamp01(1.0 - 2.0 * math.e**3 * q ** (n / 2.0))
    return GilbertBounds(exact, corollary)


def laplacian_diff_bound(n: int, lam: int, ball_1: int) -> float:
    """Bound on the normalized-Laplacian gap between coupled cut worlds."""
    if n < 2:
        raise ValueError(f"need at least two nodes, got {n}")
    if ball_1 < 1:
        raise ValueError(f"1-ball bound must be positive, got {ball_1}")
    if lam < 1:
        raise ValueError(f"lam must be at least 1, got {lam}")
    if n * lam < 2:
        raise ValueError("n*lam too small for a log")
    return math.sqrt(2.0 * lam) * ball_1 / math.sqrt(n * math.log(n * lam))


@dataclass(frozen=True)
class TheoremRegime:
    holds: bool
    lhs: float
    rhs: float


@dataclass(frozen=True)
class BoundReport:
    """Every closed-form quantity for one parameter point, plus regime flags.

    ``ub_disconnected`` is INAPPLICABLE outside its validity regime; the
    raw expression value is always retained. ``gamma_star`` uses the
    folded penalty so that, whenever the possibility regime holds,
    gamma_star == max(0, lb_connected - ub_disconnected) with identical
    factors.
    """

    n: int
    d: int
    lam: int
    p_plus: float
    p_minus: float
    eps_plus: float
    eps_minus: float
    ball_d: int
    ball_1: int
    c2: float
    c3: float
    lb_connected: float
    ub_disconnected: float | Inapplicable
    ub_disconnected_raw: float
    gamma_star: float
    gamma_star_raw: float
    theorem1: TheoremRegime
    theorem2: TheoremRegime
    theorem3: TheoremRegime

    def to_json_dict(self) -> dict:
        ub = self.ub_disconnected
        return {
            "n": self.n,
            "d": self.d,
            "lambda": self.lam,
            "p_plus": self.p_plus,
            "p_minus": self.p_minus,
            "eps_plus": self.eps_plus,
            "eps_minus": self.eps_minus,
            "ball_d": self.ball_d,
            "ball_1": self.ball_1,
            "c2": self.c2,
            "c3": self.c3,
            "lb_connected": self.lb_connected,
            "ub_disconnected": None if ub is INAPPLICABLE else ub,
            "ub_applicable": ub is not INAPPLICABLE,
            "ub_disconnected_raw": self.ub_disconnected_raw,
            "gamma_star": self.gamma_star,
            "gamma_star_raw": self.gamma_star_raw,
            "theorem1_regime": self.theorem1.holds,
            "theorem1_lhs": self.theorem1.lhs,
            "theorem1_rhs": self.theorem1.rhs,
            "theorem2_regime": self.theorem2.holds,
            "theorem2_lhs": self.theorem2.lhs,
            "theorem2_rhs": self.theorem2.rhs,
            "theorem3_regime": self.theorem3.holds,
            "theorem3_lhs": self.theorem3.lhs,
            "theorem3_rhs": self.theorem3.rhs,
        }

    def render_text(self) -> str:
        rows = []
        for key, value in self.to_json_dict().items():
            if isinstance(value, float):
                rows.append(f"{key:22s} {value:.12g}")
            else:
                rows.append(f"{key:22s} {value}")
        return "\n".join(rows)


def theorem_preconditions(
    n: int,
    d: int,
    lam: int,
    p_plus: float,
    p_minus: float,
    eps_minus: float,
    ball_d: int,
    c2: float = 2.0,
    c3: float = 2.0,
) -> tuple[TheoremRegime, TheoremRegime, TheoremRegime]:
    """Evaluate the three theorem regimes for one parameter point.

    Possibility needs folded noise below 1/(2e lam^2 n) after the B(d)^2
    factor; the impossibility regimes need it at or above c/(lam n) (with
    d at least ceil(ln n)) or above c ln n/(lam n) (with d above ln n).
    For c2 >= 1 the first two regimes are mutually exclusive, which is
    asserted here rather than trusted.
    """
    if n < 1 or d < 1 or ball_d < 1:
        raise ValueError("n, d and ball_d must be positive")
    _check_common(lam, p_plus, p_minus, eps_minus)
    if c2 <= 0 or c3 <= 0:
        raise ValueError("regime constants must be positive")
    q = fold_noise(p_minus, eps_minus)
    t1 = TheoremRegime(
        holds=q * ball_d**2 < 1.0 / (2.0 * math.e * lam**2 * n),
        lhs=q * ball_d**2,
        rhs=1.0 / (2.0 * math.e * lam**2 * n),
    )
    t2 = TheoremRegime(
        holds=q >= c2 / (lam * n) and d >= math.ceil(math.log(n)),
        lhs=q,
        rhs=c2 / (lam * n),
    )
    t3 = TheoremRegime(
        holds=q > c3 * math.log(n) / (lam * n) and d > math.log(n),
        lhs=q,
        rhs=c3 * math.log(n) / (lam * n),
    )
    if c2 >= 1.0 and t1.holds and t2.holds:
        raise AssertionError("possibility and connectivity regimes cannot overlap")
    return t1, t2, t3


def bound_report(
    n: int,
    d: int,
    lam: int,
    p_plus: float,
    p_minus: float,
    eps_plus: float,
    eps_minus: float,
    ball_d: int,
    ball_1: int,
    c2: float = 2.0,
    c3: float = 2.0,
) -> BoundReport:
    """Assemble the full report for one parameter point."""
    if ball_1 < 1:
        raise ValueError(f"1-ball bound must be positive, got {ball_1}")
    lb = lb_connected(d, lam, p_plus, eps_plus, eps_minus)
    ub = ub_disconnected(n, lam, p_minus, eps_minus, ball_d)
    ub_raw = ub_disconnected_raw(n, lam, p_minus, eps_minus, ball_d)
    gs_raw = gamma_star_raw(n, d, lam, p_plus, p_minus, eps_plus, eps_minus, ball_d)
    t1, t2, t3 = theorem_preconditions(n, d, lam, p_plus, p_minus, eps_minus, ball_d, c2, c3)
    return BoundReport(
        n=n,
        d=d,
        lam=lam,
        p_plus=p_plus,
        p_minus=p_minus,
        eps_plus=eps_plus,
        eps_minus=eps_minus,
        ball_d=ball_d,
        ball_1=ball_1,
        c2=c2,
        c3=c3,
        lb_connected=lb,
        ub_disconnected=ub,
        ub_disconnected_raw=ub_raw,
        gamma_star=max(0.0, gs_raw),
        gamma_star_raw=gs_raw,
        theorem1=t1,
        theorem2=t2,
        theorem3=t3,
    )

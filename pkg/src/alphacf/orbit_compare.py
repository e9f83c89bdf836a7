"""Matched nearest-integer vs alpha expansions and their ladder identities.

Runs the 1/2- and alpha-expansions of one starting point side by side,
labels every index by whether the two orbit states coincide, are exact
mirror images (x' = 1 - x), or sit inside a Moebius bridge between those
events, and classifies the convergent-denominator differences.  Valid for
alpha up to the golden constant g; beyond g the map grows an extra branch
and the matching breaks down.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from .cf_core import Alpha, alpha_step
from .errors import OutOfDomain, OutOfRange, PoleHit
from .numkit import (
    GOLDEN,
    GT,
    LT,
    ExactNumber,
    Surd,
    compare,
    format_exact,
    is_zero,
    sign_of,
)
from .opsreg import registered_op

_HALF = Fraction(1, 2)


@dataclass
class TraceStep:
    """One synchronized step of the matched expansions."""

    j: int
    digit_half: tuple  # (a, eps)
    digit_alpha: tuple
    x_half: ExactNumber
    x_alpha: ExactNumber
    q_half: int
    q_alpha: int
    event: str  # coincide | reflected | drift

    def to_json(self) -> str:
        return json.dumps(
            {
                "j": self.j,
                "digit_half": list(self.digit_half),
                "digit_alpha": list(self.digit_alpha),
                "x_half": format_exact(self.x_half),
                "x_alpha": format_exact(self.x_alpha),
                "q_half": self.q_half,
                "q_alpha": self.q_alpha,
                "event": self.event,
            },
            sort_keys=True,
        )


@dataclass
class MatchedTrace:
    x: ExactNumber
    alpha: Alpha
    steps: list = field(default_factory=list)
    divergence_indices: list = field(default_factory=list)

    def dump_jsonl(self) -> str:
        return "\n".join(step.to_json() for step in self.steps)


def _classify_state(xh, xa) -> str:
    if compare(xh, xa) == 0:
        return "coincide"
    if compare(xh, 1 - xa) == 0:
        return "reflected"
    return "drift"


@registered_op("orbit_compare.matched_orbits")
def matched_orbits(x: ExactNumber, alpha: Alpha, N: int) -> MatchedTrace:
    """Run the 1/2- and alpha-expansions of x in [0, 1/2] side by side.

    Steps are recorded while both orbits are alive, at most N of them.
    Divergence indices mark the first step of each non-coinciding run.
    """
    if compare(alpha.value, GOLDEN) == GT:
        raise OutOfRange("matched orbits need alpha <= (sqrt(5)-1)/2")
    if sign_of(x) < 0 or compare(x, _HALF) == GT:
        raise OutOfDomain("matched orbits start from x in [0, 1/2]")
    half = Alpha.half()
    trace = MatchedTrace(x=x, alpha=alpha)
    xh = xa = x
    qh_prev, qh = 0, 1
    qa_prev, qa = 0, 1
    eps_h_prev = eps_a_prev = 1
    prev_event = "coincide"
    for j in range(1, N + 1):
        if is_zero(xh) or is_zero(xa):
            break
        ah, eh, xh_next = alpha_step(xh, half)
        aa, ea, xa_next = alpha_step(xa, alpha)
        qh_prev, qh = qh, ah * qh + eps_h_prev * qh_prev
        qa_prev, qa = qa, aa * qa + eps_a_prev * qa_prev
        eps_h_prev, eps_a_prev = eh, ea
        xh, xa = xh_next, xa_next
        event = _classify_state(xh, xa)
        if event != "coincide" and prev_event == "coincide":
            trace.divergence_indices.append(j)
        trace.steps.append(TraceStep(j=j, digit_half=(ah, eh),
                                     digit_alpha=(aa, ea), x_half=xh,
                                     x_alpha=xa, q_half=qh, q_alpha=qa,
                                     event=event))
        prev_event = event
    return trace


@dataclass
class ClassifyResult:
    classes: list  # per recorded step: "zero" | "q_prev"
    violations: list  # human-readable violation records
    max_q_ratio_num: int  # max over j of q^(1/2)/q^(alpha) as a fraction
    max_q_ratio_den: int

    @property
    def ok(self) -> bool:
        return not self.violations


@registered_op("orbit_compare.q_difference_classify")
def q_difference_classify(trace: MatchedTrace) -> ClassifyResult:
    """Check q_j^(1/2) - q_j^(alpha) in {0, q_{j-1}^(1/2)} along the trace.

    Also checks the follow-up digit rule (a nonzero difference forces the
    next 1/2-digit to be (3,-1) or (2,+1)) and the log 2 bound on
    |log q_j^(1/2) - log q_j^(alpha)|, all in exact integer arithmetic.
    """
    classes = []
    violations = []
    best_num, best_den = 1, 1  # running max of q_half/q_alpha
    q_half_prev = 1  # q_0
    for idx, step in enumerate(trace.steps):
        diff = step.q_half - step.q_alpha
        if diff == 0:
            classes.append("zero")
        elif diff == q_half_prev:
            classes.append("q_prev")
            if idx + 1 < len(trace.steps):
                nxt = trace.steps[idx + 1].digit_half
                if nxt not in ((3, -1), (2, 1)):
                    violations.append(
                        f"j={step.j}: follow-up digit {nxt} after q_prev"
                    )
        else:
            classes.append("other")
            violations.append(
                f"j={step.j}: q difference {diff} not in {{0, {q_half_prev}}}"
            )
        # exact log-gap check: q_half <= 2 q_alpha and q_alpha <= q_half
        if step.q_half > 2 * step.q_alpha:
            violations.append(
                f"j={step.j}: log gap exceeds log 2 "
                f"({step.q_half} vs {step.q_alpha})"
            )
        if step.q_alpha > step.q_half:
            violations.append(
                f"j={step.j}: alpha denominator exceeds 1/2 denominator"
            )
        if step.q_half * best_den > best_num * step.q_alpha:
            best_num, best_den = step.q_half, step.q_alpha
        q_half_prev = step.q_half
    return ClassifyResult(classes=classes, violations=violations,
                          max_q_ratio_num=best_num, max_q_ratio_den=best_den)


@dataclass
class LadderPoint:
    """Step of the two rational ladders closing in on 1 - g."""

    index: int
    t: Fraction
    r: int
    s: int

    @property
    def rs(self) -> Fraction:
        return Fraction(self.r, self.s)


@registered_op("orbit_compare.ladder")
def ladder(i: int) -> LadderPoint:
    """i-th ladder point: t_i = 1/(3 - t_{i-1}) from 1/2, r_i/s_i from 0.

    t_i decreases to 1 - g, r_i/s_i increases to 1 - g, and the two are
    linked by 2 - 1/(1 - t_i) = r_i/s_i.
    """
    if i < 0:
        raise OutOfDomain("ladder index must be >= 0")
    t = Fraction(1, 2)
    r, s = 0, 1
    for _ in range(i):
        t = 1 / (3 - t)
        r, s = s, 3 * s - r
    return LadderPoint(index=i, t=t, r=r, s=s)


@registered_op("orbit_compare.mobius_apply")
def mobius_apply(m, x: ExactNumber) -> ExactNumber:
    """(a x + b)/(c x + d) for an integer matrix ((a, b), (c, d)), det +/-1."""
    (a, b), (c, d) = m
    det = a * d - b * c
    if det not in (1, -1):
        raise OutOfDomain(f"matrix determinant must be +/-1, got {det}")
    den = c * x + d
    if is_zero(den) if not isinstance(den, int) else den == 0:
        raise PoleHit("Moebius transform evaluated at its pole")
    return (a * x + b) / den

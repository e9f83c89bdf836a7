"""Alpha-continued fractions, k-Brjuno and Wilton functions, and BMO experiments."""

from .numkit import (  # noqa: F401
    GOLDEN,
    BallFloat,
    ExactNumber,
    Rational,
    Surd,
    compare,
    floor_of,
    format_exact,
    make_surd,
    parse_exact,
    reciprocal,
    to_mpf,
)

__version__ = "0.1.0"

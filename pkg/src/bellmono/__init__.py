"""Exact-arithmetic toolkit for Bell expressions and no-signaling monogamy."""

from bellmono.bell import (
    BellExpression,
    chained,
    chsh,
    claim3_expression,
    correlation_expression,
    evaluate,
    lift,
    restrict_bob_settings,
    unique_game,
    xor_game,
)
from bellmono.model import ConditionalBox, DeterministicStrategy, Scenario, is_no_signaling, marginalize
from bellmono.monogamy import contradiction_number, extension_optimum, strong_contradiction_number
from bellmono.solve import local_bound, ns_bound

__version__ = "0.1.0"

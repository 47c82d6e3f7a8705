"""Exact computation with singular Bernoulli distribution functions.

The functions ``F_p`` (``0 < p < 1/2``) are distribution functions of the
random binary expansion ``sum X_k / 2**k`` with ``Pr(X_k = 0) = p``.  They are
continuous, strictly increasing and have derivative zero almost everywhere.
This package computes their dyadic interval measures exactly and builds the
variation, transport, algebra and smoothing machinery on top.
"""

from singbv.errors import DomainError, RootClusterError
from singbv.dyadic import (
    DigitCounts,
    DyadicInterval,
    DyadicRational,
    digit_counts,
    halves,
    make_dyadic,
)
from singbv.bernoulli import (
    BernoulliParam,
    antiderivative,
    cdf,
    interval_measure,
    sample,
    support_separation,
)
from singbv.variation import (
    LinearCombination,
    VariationEstimate,
    distance,
    nonvanishing_check,
    norm_lower_bound,
    partition_variation,
)
from singbv.transport import TransportProblem, match_interval, translate_subinterval
from singbv.algebra import (
    ExpLike,
    GeneratorSet,
    MonomialMatrix,
    compose_with_F,
    constant_approx_error,
    count_preimage,
    eval_explike,
    make_generators,
    nonconstancy_witness,
    reduce_polynomial,
    singularity_probe,
)
from singbv.smoothing import SmoothGrid, finite_diff_check, iterated_integral

__version__ = "0.1.0"

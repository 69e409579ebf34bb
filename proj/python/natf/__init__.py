"""Non-additive thermodynamic formalism toolkit.

Pressure, entropy, Gibbs verification and large-deviation estimators for
interval maps, shifts and matrix cocycles; the heavy lifting lives in the
C++ extension module ``natf._core``.
"""

from natf._core import (  # noqa: F401
    CocycleSpec,
    DynamicalSystem,
    MeasureModel,
    MistakeFunction,
    Point,
    PotentialSequence,
    binomial_deviation_measure,
    birkhoff_potential,
    bowen_distance,
    cocycle,
    cocycle_potential,
    cocycle_pressure,
    constant_potential,
    cylinder_pressure,
    digit_frequency_potential,
    kingman,
    log_mistake_ball_cylinder_count,
    lyapunov_exact,
    lyapunov_monte_carlo,
    mistake_ball_cylinder_count,
    separated_pressure,
    sqrt_mistakes,
    symbolic_word,
    variational_gap,
    verification_suite,
    weak_gibbs_check,
    zero_mistakes,
    zero_potential,
    constant_mistakes,
)

__version__ = "0.1.0"

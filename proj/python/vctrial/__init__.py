"""Virtual clinical trials for closed-loop insulin dosing."""

from ._core import (
    build_protocol,
    classify,
    generate_population,
    meal_grams,
    mean_draws,
    mgdl_to_mmol,
    mmol_to_mgdl,
    run_trial,
    screen,
)

__all__ = [
    "build_protocol",
    "classify",
    "generate_population",
    "meal_grams",
    "mean_draws",
    "mgdl_to_mmol",
    "mmol_to_mgdl",
    "run_trial",
    "screen",
]

"""Shared test configuration.

Registers a deterministic hypothesis profile so property tests are
reproducible across runs and machines.
"""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "gouest",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gouest")

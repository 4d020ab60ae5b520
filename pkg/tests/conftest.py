"""Shared test configuration."""

from hypothesis import HealthCheck, settings

settings.register_profile(
    "slow_ok", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("slow_ok")

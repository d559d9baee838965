import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def make_price_path(closes, start="2000-01-03"):
    """PricePath with sequential synthetic dates."""
    from regimelab.dataio import PricePath

    closes = np.asarray(closes, dtype=float)
    dates = np.datetime64(start, "D") + np.arange(closes.size)
    return PricePath(dates, closes)


@pytest.fixture
def triangle_path():
    """100 -> linear decline to 70 over 50 steps -> linear rise to 100 over 150 steps."""
    down = np.linspace(100.0, 70.0, 51)
    up = np.linspace(70.0, 100.0, 151)
    return make_price_path(np.concatenate([down, up[1:]]))

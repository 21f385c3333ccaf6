import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nevanlinna.model import AtomicMeasure, DeltaSubharmonicFn, LogPotentialFn, MeromorphicSpec

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def log_abs(a, mass=1.0):
    """``mass * ln|z - a|``."""
    return LogPotentialFn(0.0, (), AtomicMeasure([(a, mass)]))


def inv_abs(a=0.0):
    """``ln(1/|z - a|)`` as a delta-subharmonic function."""
    return DeltaSubharmonicFn(LogPotentialFn(), log_abs(a))


def identity_map():
    return MeromorphicSpec(zeros=AtomicMeasure([(0, 1)]))


def reciprocal_map():
    return MeromorphicSpec(poles=AtomicMeasure([(0, 1)]))


def exp_map():
    return MeromorphicSpec(exp_poly=(0, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def approx(x, rel=1e-12, abs=1e-12):
    return pytest.approx(x, rel=rel, abs=abs)


E1 = math.e

import pytest

from decaycut import BandModel, SystemParams


@pytest.fixture
def weak():
    return BandModel.constant(0.02), SystemParams(-0.4)


@pytest.fixture
def strong():
    return BandModel.constant(0.2), SystemParams(-0.4)


@pytest.fixture
def chain():
    return BandModel.chain(0.5), SystemParams(0.0)

import json
from pathlib import Path

import pytest

from proofnets.bayes_bridge import bn_from_dict, compile_bn
from proofnets.rewrite import show

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rain5_path():
    return FIXTURES / "rain5.json"


@pytest.fixture
def rain5(rain5_path):
    return bn_from_dict(json.loads(rain5_path.read_text()))


@pytest.fixture
def rain5_positive(rain5):
    """(net, valuation) with every variable as a positive conclusion."""
    return compile_bn(rain5, "positive")


@pytest.fixture
def rain5_empty(rain5):
    """(net, valuation) with every variable hidden."""
    return compile_bn(rain5, "empty")


@pytest.fixture
def rain5_d(rain5_empty):
    """The empty-conclusion net with D shown: its only conclusion is D+."""
    net, valuation = rain5_empty
    return show(net, "D"), valuation

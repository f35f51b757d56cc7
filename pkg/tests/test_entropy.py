import math

import numpy as np
import pytest

from zeroleak.core import ValidationError
from zeroleak.entropy import binary_entropy, inverse_binary_entropy


def test_entropy_endpoints_and_peak():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.5) == 1.0
    assert inverse_binary_entropy(1.0) == 0.5
    assert inverse_binary_entropy(0.0) == 0.0


def test_entropy_known_value():
    # h(1/4) = 2 - (3/4) log2 3, computed independently
    expected = 2.0 - 0.75 * math.log2(3.0)
    assert binary_entropy(0.25) == pytest.approx(expected, abs=1e-15)


def test_inverse_roundtrip_grid():
    for p in np.linspace(0.001, 0.5, 57):
        assert inverse_binary_entropy(binary_entropy(p)) == pytest.approx(p, abs=1e-9)


def test_inverse_accurate_near_flat_top():
    # h is flat near 1/2; interval bisection must still pin p itself
    p = 0.4999
    assert inverse_binary_entropy(binary_entropy(p)) == pytest.approx(p, abs=1e-9)


def test_inverse_returns_lower_branch():
    assert inverse_binary_entropy(binary_entropy(0.85)) == pytest.approx(0.15, abs=1e-9)


def test_domain_validation():
    with pytest.raises(ValidationError):
        binary_entropy(1.5)
    with pytest.raises(ValidationError):
        inverse_binary_entropy(1.0 + 1e-6)
    with pytest.raises(ValidationError):
        inverse_binary_entropy(-1e-6)
    # within clamping headroom
    assert inverse_binary_entropy(1.0 + 1e-10) == 0.5
    assert inverse_binary_entropy(-1e-10) == 0.0

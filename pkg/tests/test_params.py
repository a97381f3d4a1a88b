import math

import pytest

from quasiflow import Params, critical_exponent, threshold_constant
from quasiflow.errors import AdmissibilityError


def test_critical_exponents():
    assert critical_exponent(3) == 11.0
    assert critical_exponent(3, kappa=0.0) == 5.0
    assert critical_exponent(2) == math.inf


@pytest.mark.parametrize("kw", [dict(dim=2, p=2.5), dict(dim=3, p=11.0), dict(dim=0, p=3.0),
                                dict(dim=2, p=3.0, kappa=-1.0), dict(dim=2, p=3.0, lam=-0.1),
                                dict(dim=3, p=5.0, kappa=0.0)])
def test_inadmissible_rejected(kw):
    with pytest.raises(AdmissibilityError):
        Params(**kw)


def test_exploratory_flag():
    prm = Params(2, 2.0, strict=False)
    assert prm.exploratory and not prm.admissible
    assert Params(3, 10.9).admissible


def test_threshold_constant():
    assert threshold_constant(3) == pytest.approx(math.sqrt(2))
    assert threshold_constant(5) == pytest.approx(3**0.25)


def test_with_helpers_copy():
    prm = Params(2, 3.0)
    assert prm.with_lam(1.5).lam == 1.5 and prm.lam == 0.0
    assert prm.with_kappa(0.0).kappa == 0.0

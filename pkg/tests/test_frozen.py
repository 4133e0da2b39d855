"""Values produced by the oracles once and frozen; guards against silent drift."""

import numpy as np
import pytest

from greenqtl.growth import calibrate_E, simulate, sink_kernel
from oracles import beta_weights, brute_force_growth

TOY_Q = [0.048286667500357094, 0.05277783846562775, 0.05294293964988965,
         0.003819979041921573, 0.00015467120978212223]
TOY_FINAL_COB = 0.10090314395894204
KERNEL_04_8 = [0.03563482210778629, 0.1465931329119228, 0.22230540637333132, 0.23528511882651226,
               0.19243270490552086, 0.11830739180025147, 0.045358214282445956, 0.004083208792229118]
CALIBRATED_E = 15.838252588795887


def test_oracles_reproduce_frozen_values(toy):
    traits, constants = toy
    ref = brute_force_growth(traits, constants)
    assert np.allclose(ref["Q"], TOY_Q, rtol=1e-12)
    assert ref["biomass"]["cob"][-1] == pytest.approx(TOY_FINAL_COB, rel=1e-12)
    assert np.allclose(beta_weights(0.4, 8), KERNEL_04_8, rtol=1e-12)


def test_package_reproduces_frozen_values(toy):
    traits, constants = toy
    s = simulate(traits, constants)
    assert np.allclose(s.Q, TOY_Q, rtol=1e-9)
    assert s.final_cob_weight == pytest.approx(TOY_FINAL_COB, rel=1e-9)
    assert np.allclose(sink_kernel(0.4, 8), KERNEL_04_8, rtol=1e-12)
    assert calibrate_E().E == pytest.approx(CALIBRATED_E, rel=1e-9)

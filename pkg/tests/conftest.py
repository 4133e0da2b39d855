import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from greenqtl.growth import GeneticTraits, GrowthConstants, calibrate_E  # noqa: E402


@pytest.fixture(scope="session")
def calibrated():
    return calibrate_E()


@pytest.fixture
def toy():
    """Three metamers over five cycles, short expansions so every organ finishes."""
    constants = GrowthConstants(E=2.0, Sp=50.0, k=0.7, tb=3, cycle_count=5, phytomer_count=3,
                                tassel_cycle=4, blade_expansion=2, sheath_expansion=3,
                                internode_expansion=2, cob_expansion=2, tassel_expansion=2)
    traits = GeneticTraits(short_internode_count=1, ear_cycle=3, seed_biomass=0.3)
    return traits, constants

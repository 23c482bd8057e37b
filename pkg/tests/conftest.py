import numpy as np
import pytest

from minksurf.analysis import Immersion
from minksurf.fixtures import (
    constant_triple,
    cylinder_immersion,
    goursat_degenerate_triple,
    jet_triple,
)
from minksurf.frames import reconstruct
from minksurf.natural import Case


@pytest.fixture(scope="session")
def constant_bundle():
    return reconstruct(constant_triple(65))


@pytest.fixture(scope="session")
def jet_bundle():
    return reconstruct(jet_triple(Case.POSITIVE_KH, order=6, radius=0.1, nodes=65))


@pytest.fixture(scope="session")
def degenerate_bundle():
    return reconstruct(goursat_degenerate_triple(65))


@pytest.fixture(scope="session")
def cylinder():
    return cylinder_immersion(65)


def immersion_of(bundle) -> Immersion:
    return Immersion(bundle.grid, bundle.points)


def interior_max(values: np.ndarray, grid, layers: int = 2) -> float:
    su, sv = grid.interior(layers)
    return float(np.max(np.abs(values[su, sv])))

import numpy as np
import pytest

from igclab import LadderParams, OBC, PBC


@pytest.fixture
def fig3_params():
    """Nearest-coupling ladder in the regime with surviving real modes."""
    def make(t0=0.3, bc=OBC, L=200, gamma=0.5):
        return LadderParams(L=L, t=[t0, 0.5], t_p=0.5, phi=np.pi / 2,
                            gamma=gamma, bc=bc)
    return make


@pytest.fixture
def commensurate_params():
    """Couplings whose connection-condition momentum 3*pi/5 sits on the L=200
    grid, so the finite periodic ring hosts the surviving modes exactly."""
    def make(L=200, bc=PBC, gamma=0.5):
        return LadderParams(L=L, t=[0.5 * np.cos(2 * np.pi / 5), 0.5],
                            t_p=0.5, phi=np.pi / 2, gamma=gamma, bc=bc)
    return make

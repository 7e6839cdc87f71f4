import pathlib

import pytest

from unli.trial import COPD_PRESET_SEED, copd_preset, synth_trial

DATA_DIR = pathlib.Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def golden_grid_path() -> pathlib.Path:
    return DATA_DIR / "unli2d_grid_3dp.csv"


@pytest.fixture(scope="session")
def copd_dataset():
    """The bundled synthetic trial at its calibration-verified seed."""
    return synth_trial(copd_preset(), COPD_PRESET_SEED)

import numpy as np
import pytest

from gatemine.recording import Recording, StateWindow, synthesize_recording


@pytest.fixture
def seven_ids():
    """A mixed bag of table ids covering trivial and structured functions."""
    return [32767, 0, 65535, 2048, 32768, 65534, 256]


@pytest.fixture
def clean_recording(seven_ids):
    """Noise-free synthetic session with 100 mV spikes, 64 samples per state."""
    return synthesize_recording(seven_ids, peak_amplitude_mv=100.0, seed=11)


def make_window(samples, state_index=0, start=0):
    """Wrap one channel's samples into a StateWindow (other channels zeroed)."""
    arr = np.asarray(samples, dtype=np.float64)
    slices = tuple(arr if c == 0 else np.zeros_like(arr) for c in range(7))
    return StateWindow(
        state_index=state_index, start=start, end=start + arr.size, channel_slices=slices
    )

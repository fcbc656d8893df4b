import numpy as np
import pytest
import scipy.io.wavfile


@pytest.fixture
def write_wav(tmp_path):
    """Write a sample array to a WAV file in tmp_path and return its path."""

    def _write(name, data, sample_rate, dtype=np.float32):
        path = tmp_path / name
        scipy.io.wavfile.write(path, sample_rate, np.asarray(data).astype(dtype))
        return path

    return _write


def single_joint_poses(x_positions, fps):
    """PoseSequence with one 3-D joint moving along x."""
    from harmo.motion import PoseSequence

    x = np.asarray(x_positions, dtype=float)
    frames = np.zeros((len(x), 1, 3))
    frames[:, 0, 0] = x
    return PoseSequence(frames, fps)


def profile_from_values(values, fps=1.0):
    """VelocityProfile with the given values on a uniform frame grid."""
    from harmo.motion import VelocityProfile

    values = np.asarray(values, dtype=float)
    times = np.arange(1, len(values) + 1) / fps
    return VelocityProfile(values, times)

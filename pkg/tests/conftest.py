import numpy as np
import pytest

from oft.physio import PupilSeries, RRSeries


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_beats(rr_ms, t0=0.0):
    """Build an RRSeries from a list of intervals, deriving beat times cumulatively."""
    rr = np.asarray(rr_ms, dtype=float)
    t = t0 + np.cumsum(rr) / 1000.0
    return RRSeries(timestamps=t, intervals_ms=rr)


def make_pupil(diam_mm, hz=4.0, t0=0.0, valid=None):
    d = np.asarray(diam_mm, dtype=float)
    t = t0 + np.arange(len(d)) / hz
    if valid is None:
        valid = np.ones(len(d), dtype=bool)
    return PupilSeries(timestamps=t, diameters_mm=d, valid=np.asarray(valid, dtype=bool))


@pytest.fixture
def synth_streams(rng):
    """Ten minutes of plausible physiology: steady RR around 800 ms, pupil around 3.4 mm."""
    n_beats = 800
    rr = 800.0 + rng.normal(0.0, 40.0, n_beats)
    beats = make_beats(rr)
    n_p = int(600 * 4)
    pupil = make_pupil(3.4 + rng.normal(0.0, 0.12, n_p))
    return beats, pupil


def blob_dataset(rng, n_per=60, sigma=0.1, spread=3.0):
    """Three well separated gaussian blobs in 2-D, centers spread*3*sigma apart."""
    gap = spread * 3 * sigma
    centers = np.array([[0.0, 0.0], [gap, 0.0], [0.0, gap]])
    X, y = [], []
    for label, c in enumerate(centers):
        X.append(c + rng.normal(0.0, sigma, (n_per, 2)))
        y.append(np.full(n_per, label))
    return np.vstack(X), np.concatenate(y)

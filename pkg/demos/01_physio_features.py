"""
Per-second physiological features from raw streams
===================================================

Build a synthetic beat series and a pupil trace, then frame both into
per-second features: rolling SDNN over the last 100 intervals and a
z-scored pupil diameter.
"""

import numpy as np

from oft import physio
from oft.microworld import generate_beats, generate_pupil

rng = np.random.default_rng(7)

# ten calm minutes, then the load picks up
load = lambda t: 0.1 if t < 300 else 0.7

beat_times, intervals = generate_beats(load, 600.0, rng)
pupil_times, diameters = generate_pupil(load, 600.0, rng)

beats = physio.RRSeries(beat_times, intervals)
pupil = physio.PupilSeries(pupil_times, diameters)

framed = physio.per_second_frames(beats, pupil)
print(f"{len(framed.frames)} seconds framed, meta: {framed.meta}")

# the warmup flag clears once the SDNN window is fully populated
first_full = next(f for f in framed.frames if not f.warmup)
print(f"SDNN window full at t={first_full.t} s")

for t in (120, 290, 320, 580):
    f = framed.frames[t]
    print(f"t={f.t:4d}  sdnn={f.hrv_sdnn_ms:7.2f} ms  pupil_z={f.pupil_z:+.2f}")

# heart-rate variability drops and the pupil dilates when the load steps up
calm = [f.hrv_sdnn_ms for f in framed.frames[150:290]]
busy = [f.hrv_sdnn_ms for f in framed.frames[400:]]
print(f"mean SDNN calm {np.mean(calm):.1f} ms vs busy {np.mean(busy):.1f} ms")

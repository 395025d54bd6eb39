"""
Coding control modes from tank traces
=====================================

Each supervision period leaves a per-second record of the two tank levels.
Coding a whole period into one of the four ordered modes takes nothing but
the extremes of the two series, so we can sketch each mode with a few
hand-built traces, then look at how the bundled 56-participant roster moved
between modes from the low-demand period to the high-demand one.
"""

from importlib import resources

import numpy as np

from oft.cocom import (
    MODE_ORDER,
    TankTrace,
    code_mode,
    read_roster_csv,
    transitions,
)

t = np.arange(600.0)

# step 1: one archetypal trace per mode ------------------------------------

# steady around target, never near the band edges: the routine tactical case
tactical = TankTrace(
    tank_a=2500 + 180 * np.sin(t / 40),
    tank_b=2450 + 150 * np.cos(t / 55),
    period="steady",
)

# wide but compliant swings, riding the upper margin: planned-ahead strategic
strategic = TankTrace(
    tank_a=2500 + 450 * np.sin(t / 80),
    tank_b=2600 + 350 * np.cos(t / 60),
    period="wide",
)

# one tank briefly sags into the error band just under the floor
dip = 2400 + 120 * np.sin(t / 30)
dip[200:215] = 1980
opportunistic = TankTrace(tank_a=dip, tank_b=2550 + 90 * np.cos(t / 45), period="sag")

# and a genuine loss of control: a level crashes through the scrambled floor
crash = 2500 - 3.0 * t
scrambled = TankTrace(tank_a=np.maximum(crash, 1700), tank_b=2500 + 0 * t, period="crash")

for trace in (tactical, strategic, opportunistic, scrambled):
    mode = code_mode(trace)
    lo = min(trace.tank_a.min(), trace.tank_b.min())
    hi = max(trace.tank_a.max(), trace.tank_b.max())
    print(f"{trace.period:7s} levels in [{lo:6.0f}, {hi:6.0f}] -> {mode.name}")
print()

# step 2: the bundled roster ------------------------------------------------

roster_path = resources.files("oft") / "data" / "cocom_roster.csv"
roster = read_roster_csv(str(roster_path))
matrix = transitions([(low, high) for _, low, high in roster])

names = [m.name[:5] for m in MODE_ORDER]
print(f"{len(roster)} participants, low-demand period (rows) vs high (columns)")
print(" " * 8 + "".join(f"{n:>7s}" for n in names))
for i, row_name in enumerate(names):
    cells = "".join(f"{matrix.counts[i, j]:7d}" for j in range(4))
    print(f"{row_name:>7s} {cells}")
print()
print("low-demand marginals: ", matrix.first_period_marginals.tolist())
print("high-demand marginals:", matrix.second_period_marginals.tolist())
stayed = int(np.trace(matrix.counts))
print(f"stayed in mode: {stayed}/{len(roster)}")
print(f"one-step share of the moves: {matrix.adjacency_fraction:.3f}")

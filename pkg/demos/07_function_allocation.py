"""
Allocating functions between rider and machine
==============================================

The bundled bike model has four functions (F1 speed regulation, F2
trajectory holding, F3 environment watching, F4 pedalling), two resources
(H the rider, M the assistance unit), and per-situation statuses for each
allocatable couple. We build the mission envelope for a compound situation,
check feasibility, then ask the solver for the cheapest allocation under
each of the two cost criteria.
"""

from oft.dfaplan import default_bike_model
from oft.errors import InfeasibleError

model = default_bike_model()
print("couples:", ", ".join(model.couple_ids))
print()

# step 1: a rideable mission -------------------------------------------------

mission = ["S1", "S4", "S6"]
print(f"mission {'+'.join(mission)}")
print("  must cover:", ", ".join(str(r) for r in model.min_config(mission)))
pot = model.pot(mission)
print("  available: ", ", ".join(str(e) for e in pot.entries))
print("  feasible:  ", model.check(mission).feasible)
print()

# step 2: the two optimization criteria pull different ways ------------------

for criterion in ("rider_load", "energy"):
    sol = model.solve(mission, criterion)
    print(f"  cheapest by {criterion:10s}: {' '.join(sol.couples)}  (cost {sol.cost:g})")
print()

# minimizing rider load pays for the motor assist (F1-M needs F1-H engaged),
# minimizing energy leaves everything on the rider

# step 3: an impossible mission ----------------------------------------------

broken = ["S2", "S7", "S8"]
report = model.check(broken)
print(f"mission {'+'.join(broken)} feasible: {report.feasible}")
for conflict in report.conflicts:
    print("  conflict:", conflict)

try:
    model.solve(broken, "rider_load")
except InfeasibleError as exc:
    print("  solver agrees, unsatisfiable core:", "; ".join(exc.report["core"]))
print()

# step 4: a staged scenario --------------------------------------------------

# solving step by step keeps earlier allocations as history, which matters
# for couples that are only admissible after their antecedents ran
steps = [["S1"], ["S1", "S4"], ["S1", "S4", "S6"]]
solutions = model.solve_sequence(steps, "rider_load")
for step, sol in zip(steps, solutions):
    print(f"  after {'+'.join(step):10s} -> {' '.join(sol.couples)}  (cost {sol.cost:g})")

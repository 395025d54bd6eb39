"""
Spotting regulation in an activity trace
========================================

An operator juggles three tasks. We feed the tracker one tick per second:
which tasks they engaged, whether each was handled the prescribed way, and
a performance reading. The tracker flags the seconds where the balance of
prescribed handling shifted and names the kind of regulation. This little
story walks through all five kinds.
"""

from oft.regulation import ActivityTracker, TaskTick

tracker = ActivityTracker()

# (engaged tasks, tasks handled per prescription, performance) per second
story = [
    ({"triage", "log"}, {"triage", "log"}, 0.9),            # clean start
    ({"triage", "log"}, {"triage", "log"}, 0.9),
    ({"triage", "log", "scan"}, {"triage", "log", "scan"}, 0.8),  # scan arrives, handled well
    ({"triage", "log", "scan"}, {"triage", "scan"}, 0.8),   # log shed as demand rose
    ({"triage", "log", "scan"}, {"triage", "scan"}, 0.4),
    ({"triage", "log", "scan"}, {"triage", "log", "scan"}, 0.4),  # log resumed while struggling
    ({"triage", "log", "scan"}, {"triage", "log"}, 0.7),    # scan off-script, no fresh demand
    ({"triage", "log", "scan"}, {"triage", "log", "scan"}, 0.7),  # and back on script
]

for t, (engaged, prescribed, perf) in enumerate(story):
    at = {task: int(task in engaged) for task in ("triage", "log", "scan")}
    ot = {task: int(task in prescribed) for task in engaged}
    snap, event = tracker.ingest(TaskTick(t=t, at=at, ot=ot), perf)
    marker = f"  <-- {event.kind.value}" if event else ""
    print(f"t={t}  nps={snap.nps}  cps={snap.cps}  perf={perf:.1f}{marker}")

print()
print(f"events: {[(e.t, e.kind.value) for e in tracker.events]}")
print(f"compliance over the session: {tracker.compliance_rate():.3f}")

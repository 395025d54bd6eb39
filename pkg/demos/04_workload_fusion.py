"""
Fusing four indicators into one workload level
==============================================

The workload estimate is a five-level posterior over a small star-shaped
network: task difficulty, regulation behaviour, performance, and effort
each vote through their conditional table. Continuous readings enter as
soft evidence through overlapping fuzzy bands, so a performance of 0.5
counts partly as "degraded" and partly as "poor".
"""

from oft.fusion import MwlNetwork, SoftEvidence, fuzzify, mwl_level, posterior

net = MwlNetwork.default()

# fuzzify a few raw readings against the bundled performance partition
part = net.partitions["performance"]
for reading in (0.95, 0.60, 0.45, 0.20):
    weights = {k: round(v, 2) for k, v in part.membership(reading).items() if v > 0}
    print(f"performance {reading:.2f} -> {weights}")
print()


def show(title, evidence):
    post = posterior(net, evidence)
    bars = "  ".join(f"{k + 1}:{p:.2f}" for k, p in enumerate(post))
    print(f"{title:32s} level {mwl_level(post)}   [{bars}]")


show("calm baseline", [
    SoftEvidence.hard("constraint", "td1"),
    SoftEvidence.hard("behaviour", "none"),
    fuzzify(0.95, net.partitions["performance"]),
    fuzzify(-0.5, net.partitions["effort"]),
])

show("working hard, holding up", [
    SoftEvidence.hard("constraint", "td2"),
    SoftEvidence.hard("behaviour", "performance_oriented"),
    fuzzify(0.85, net.partitions["performance"]),
    fuzzify(1.6, net.partitions["effort"]),
])

show("shedding tasks under pressure", [
    SoftEvidence.hard("constraint", "td3"),
    SoftEvidence.hard("behaviour", "cost_oriented"),
    fuzzify(0.45, net.partitions["performance"]),
    fuzzify(2.4, net.partitions["effort"]),
])

# evidence can be partial: leaving a channel out just widens the posterior
show("difficulty alone (td3)", [SoftEvidence.hard("constraint", "td3")])

"""Stream a simulated breathing belt through the cycle detector.

The simulator breathes at 12 cycles/min, takes three commanded deep
breaths at t=10 s, and the hysteresis detector segments the signal into
cycles; a counter fires after the third deep one.

Run: python3 demos/breath_detector.py
"""

import json

from vif import DeepBreathCounter, DetectorSpec, BreathDetector, Sample, decode_sample
from vif.simulator import generate_lines, parse_scenario

scenario = parse_scenario(
    [
        json.dumps({"at": 10_000, "cmd": "deepbreath", "n": 3}),
        json.dumps({"at": 30_000, "cmd": "end"}),
    ]
)

detector = BreathDetector()
counter = DeepBreathCounter(spec=DetectorSpec("breathVar", 3))

print(f"thresholds: rise>{detector.theta_hi} fall<{detector.theta_lo} deep>={detector.theta_deep}")
print(f"{'t_end':>7}  {'amplitude':>9}  {'duration':>8}  deep?  counter")
for line in generate_lines(scenario, seed=1):
    sample = decode_sample(line)
    if sample.sig != "breath":
        continue
    cycle = detector.step(sample)
    if cycle is None:
        continue
    fired = counter.update(cycle)
    deep = "yes" if cycle.amplitude >= detector.theta_deep else "no"
    mark = "  <- DetectorEvent fires" if fired else ""
    print(
        f"{cycle.t_end:>7}  {cycle.amplitude:>9.4f}  {cycle.duration_ms:>7}ms  {deep:<5}  "
        f"{counter.count}/{counter.spec.count}{mark}"
    )

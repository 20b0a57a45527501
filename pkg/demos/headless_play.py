"""Play the bundled story headlessly and trace the whole demo arc.

Faked stress fires the opening conditional, a gaze dwell picks "yes,
please.", the reader turns south to find Bob, a dwell accepts his
offer, and three deep breaths finish the training.

Run: python3 demos/headless_play.py
"""

import json
import tempfile
from pathlib import Path

from vif import run_headless

CORPUS = Path(__file__).parent.parent / "corpus"

out = Path(tempfile.mkdtemp()) / "transcript.jsonl"
code = run_headless(
    CORPUS / "figure7.vif",
    scenario_path=CORPUS / "demo_scenario.jsonl",
    input_script_path=CORPUS / "demo_inputs.jsonl",
    seed=1,
    out_path=out,
)
print(f"exit code: {code}")
print(f"transcript: {out}")

events = [json.loads(line) for line in out.read_text().splitlines()]
print(f"{len(events)} events; story beats:")
for event in events:
    if event["ev"] in ("section", "transition", "choice", "detector", "day_phase"):
        print(f"  {event}")

path = [e["id"] for e in events if e["ev"] == "section"]
print(f"\nsections visited: {' -> '.join(path)}")

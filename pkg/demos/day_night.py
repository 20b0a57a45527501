"""The virtual day: sun trajectory, night flag, and wolves at night.

A game day lasts 20 real seconds here. Conditionals evaluate once when
their delay expires, so the camp section polls: a `day` conditional
loops back to camp while the sun is up, and the `night` branch wins as
soon as it sets.

Run: python3 demos/day_night.py
"""

from vif import SessionConfig, day_phase, parse_script, start_session

config = SessionConfig(game_day_real_seconds=20.0)

print(f"{'t(ms)':>7}  {'fraction':>8}  {'azimuth':>7}  {'elevation':>9}  night")
for t in range(0, 20_001, 2_000):
    gt = day_phase(config, t)
    print(
        f"{t:>7}  {gt.fraction:>8.3f}  {gt.sun_azimuth:>7.1f}  {gt.sun_elevation:>9.2f}  {gt.night}"
    )

story, _ = parse_script(
    "#ACTIVATE: camp\n"
    "* Watcher @front:#watch:#medium:\n"  # in view, so conditionals arm right away
    "* camp\n"
    "  bind:2000:night goto:wolves\n"
    "  bind:2000:day goto:camp\n"
    "  The fire crackles low.\n"
    "* wolves\n"
    "  Yellow eyes circle the camp.\n"
)

session, _ = start_session(story, config)
print("\npolling every 2 s in the camp…")
for t in range(0, 20_001, 500):
    for event in session.tick(t):
        if event["ev"] in ("transition", "day_phase"):
            print(f"  t={t:>6} {event}")
    if session.current_section == "wolves":
        print("  the wolves are out.")
        break

// Heartbeat typography: an exponential pulse envelope applied to spans
// bound to the "heart" signal.

export const PULSE_TAU_MS = 150;
export const PULSE_GAIN = 0.25;

/** Scale factor at `now` given the last (synthesized) beat instant. */
export function pulseScale(now: number, lastBeat: number | null): number {
  if (lastBeat === null || now < lastBeat) {
    return 1;
  }
  return 1 + PULSE_GAIN * Math.exp(-(now - lastBeat) / PULSE_TAU_MS);
}

/** Color mix weight toward the accent color; same envelope as the scale. */
export function pulseMix(now: number, lastBeat: number | null): number {
  return (pulseScale(now, lastBeat) - 1) / PULSE_GAIN;
}

/**
 * Synthesizes beat instants at 60000/bpm intervals, phase-locked to the
 * most recent Bio update (each engine bpm message marks a real beat).
 */
export class BeatClock {
  private bpm: number | null = null;
  private anchor = 0;

  onBpm(bpm: number, now: number): void {
    this.bpm = bpm;
    this.anchor = now;
  }

  intervalMs(): number | null {
    return this.bpm === null ? null : 60000 / this.bpm;
  }

  lastBeat(now: number): number | null {
    const interval = this.intervalMs();
    if (interval === null) {
      return null;
    }
    if (now <= this.anchor) {
      return this.anchor;
    }
    const beats = Math.floor((now - this.anchor) / interval);
    return this.anchor + beats * interval;
  }
}

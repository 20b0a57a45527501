import { describe, expect, it } from 'vitest';

import { PanelSimulator } from '../src/sim.js';

function collect(): { lines: string[]; sim: PanelSimulator } {
  const lines: string[] = [];
  const sim = new PanelSimulator((line) => lines.push(line));
  return { lines, sim };
}

describe('PanelSimulator', () => {
  it('emits breath samples on a 100 ms grid and beats at 60000/bpm', () => {
    const { lines, sim } = collect();
    sim.bpm = 75;
    sim.advanceTo(4000);
    const records = lines.map((l) => JSON.parse(l));
    const breath = records.filter((r) => r.sig === 'breath');
    const beats = records.filter((r) => r.ev === 'beat');
    expect(breath.map((r) => r.t)).toEqual(
      Array.from({ length: 41 }, (_, i) => i * 100),
    );
    expect(beats.map((r) => r.t)).toEqual([0, 800, 1600, 2400, 3200, 4000]);
    for (const r of breath) {
      expect(r.v).toBeGreaterThanOrEqual(0);
      expect(r.v).toBeLessThanOrEqual(1);
    }
  });

  it('raises the amplitude for exactly the requested deep cycles', () => {
    const { lines, sim } = collect();
    sim.deepBreaths(2); // 12/min -> 5 s per cycle; cycles [0,5s) and [5s,10s) deep
    sim.advanceTo(20000);
    const values = lines.map((l) => JSON.parse(l)).filter((r) => r.sig === 'breath');
    const amplitudeOver = (lo: number, hi: number) => {
      const window = values.filter((r) => r.t >= lo && r.t < hi).map((r) => r.v);
      return Math.max(...window) - Math.min(...window);
    };
    expect(amplitudeOver(0, 5000)).toBeGreaterThan(0.85);
    expect(amplitudeOver(5000, 10000)).toBeGreaterThan(0.85);
    expect(amplitudeOver(10000, 15000)).toBeLessThan(0.72);
  });

  it('sends forced flags immediately', () => {
    const { lines, sim } = collect();
    sim.setStressed(true, 1234);
    expect(JSON.parse(lines[0])).toEqual({
      t: 1234,
      src: 'sim',
      sig: 'sim.stressed',
      ev: 'true',
    });
  });

  it('never rewinds its grid when advanced repeatedly', () => {
    const { lines, sim } = collect();
    sim.advanceTo(500);
    sim.advanceTo(500);
    sim.advanceTo(700);
    const ts = lines.map((l) => JSON.parse(l)).filter((r) => r.sig === 'breath').map((r) => r.t);
    expect(ts).toEqual([0, 100, 200, 300, 400, 500, 600, 700]);
  });
});

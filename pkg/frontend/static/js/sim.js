// In-browser sensor simulator behind the control panel: a breath
// sinusoid on a 100 ms grid plus heartbeats, emitted as wire lines and
// tunnelled to the engine over the client channel. Timestamps are
// panel-local; the server maps them to session time on first contact.
export const BREATH_SAMPLE_MS = 100;
export const BASE_AMP = 0.35;
export const DEEP_AMP = 0.45;
export class PanelSimulator {
    constructor(send) {
        this.send = send;
        this.breathRate = 12; // cycles per minute
        this.bpm = 70;
        this.t = 0;
        this.phase = 0; // in cycles
        this.cycleIndex = -1;
        this.amp = BASE_AMP;
        this.deepLeft = 0;
        this.nextBeat = 0;
    }
    deepBreaths(n) {
        this.deepLeft += n;
    }
    setStressed(value, now) {
        this.send(JSON.stringify({
            t: Math.round(now),
            src: 'sim',
            sig: 'sim.stressed',
            ev: value ? 'true' : 'false',
        }));
    }
    /** Generate and send every sample due up to panel time `now` (ms). */
    advanceTo(now) {
        while (this.t <= now) {
            this.phase += (this.breathRate * BREATH_SAMPLE_MS) / 60000;
            const cycle = Math.floor(this.phase);
            if (cycle > this.cycleIndex) {
                this.cycleIndex = cycle;
                this.amp = this.deepLeft > 0 ? DEEP_AMP : BASE_AMP;
                if (this.deepLeft > 0) {
                    this.deepLeft -= 1;
                }
            }
            const v = 0.5 + this.amp * Math.sin(2 * Math.PI * (this.phase - cycle));
            this.send(JSON.stringify({
                t: this.t,
                src: 'bits',
                sig: 'breath',
                v: Math.round(v * 10000) / 10000,
            }));
            this.t += BREATH_SAMPLE_MS;
        }
        while (this.nextBeat <= now) {
            this.send(JSON.stringify({ t: Math.round(this.nextBeat), src: 'polar', sig: 'heart', ev: 'beat' }));
            this.nextBeat += 60000 / this.bpm;
        }
    }
}

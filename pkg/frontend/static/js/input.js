// Input plumbing: local yaw accumulates continuously from keys/drag;
// yaw frames go to the engine throttled to 20 Hz.
export const YAW_SEND_INTERVAL_MS = 50; // 20 Hz
export const KEY_TURN_DEG_PER_S = 120;
export const DRAG_DEG_PER_PX = 0.25;
export function wrapYaw(deg) {
    return ((deg % 360) + 360) % 360;
}
export class YawController {
    constructor(send, minIntervalMs = YAW_SEND_INTERVAL_MS) {
        this.send = send;
        this.minIntervalMs = minIntervalMs;
        this.yaw = 0;
        this.lastSentAt = -Infinity;
        this.lastSentYaw = null;
    }
    turnBy(deltaDeg) {
        this.yaw = wrapYaw(this.yaw + deltaDeg);
    }
    /** Send at most one yaw frame per interval, and only when it moved. */
    flush(now) {
        if (now - this.lastSentAt < this.minIntervalMs) {
            return;
        }
        if (this.lastSentYaw !== null && Math.abs(this.yaw - this.lastSentYaw) < 1e-9) {
            return;
        }
        this.lastSentAt = now;
        this.lastSentYaw = this.yaw;
        this.send(this.yaw);
    }
}

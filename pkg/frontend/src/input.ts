// Input plumbing: local yaw accumulates continuously from keys/drag;
// yaw frames go to the engine throttled to 20 Hz.

export const YAW_SEND_INTERVAL_MS = 50; // 20 Hz
export const KEY_TURN_DEG_PER_S = 120;
export const DRAG_DEG_PER_PX = 0.25;

export function wrapYaw(deg: number): number {
  return ((deg % 360) + 360) % 360;
}

export class YawController {
  yaw = 0;
  private lastSentAt = -Infinity;
  private lastSentYaw: number | null = null;

  constructor(
    private readonly send: (deg: number) => void,
    private readonly minIntervalMs: number = YAW_SEND_INTERVAL_MS,
  ) {}

  turnBy(deltaDeg: number): void {
    this.yaw = wrapYaw(this.yaw + deltaDeg);
  }

  /** Send at most one yaw frame per interval, and only when it moved. */
  flush(now: number): void {
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

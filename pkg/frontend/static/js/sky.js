// Day/night backdrop: sky gradient from sun elevation, sun disc drawn at
// its azimuth on the same compass strip as the text blocks.
import { wrapDelta } from './layout.js';
export function skyGradient(day) {
    const e = day.elevation;
    if (e >= 30) {
        return 'linear-gradient(#79b8ff, #cfe8ff)';
    }
    if (e >= 0) {
        return 'linear-gradient(#8aa8d8, #ffd9a0)'; // low sun, golden horizon
    }
    if (e >= -30) {
        return 'linear-gradient(#1d2746, #4a3b5c)'; // dusk
    }
    return 'linear-gradient(#05070f, #101830)'; // deep night
}
export function sunPosition(day, yaw, viewportWidth, pxPerDegree) {
    const delta = wrapDelta(day.azimuth - yaw);
    const x = viewportWidth / 2 + pxPerDegree * delta;
    // elevation 90 -> top of the sky band, 0 -> horizon, below -> hidden
    const y = 0.9 - (day.elevation / 90) * 0.8;
    return { x, y, visible: day.elevation >= 0 && Math.abs(delta) <= 90 };
}
/** Compass tick marks (N/E/S/W) positioned like blocks. */
export function compassTicks(yaw, viewportWidth, pxPerDegree) {
    const marks = [
        ['N', 0],
        ['E', 90],
        ['S', 180],
        ['W', 270],
    ];
    return marks
        .map(([label, deg]) => ({
        label,
        x: viewportWidth / 2 + pxPerDegree * wrapDelta(deg - yaw),
    }))
        .filter((m) => m.x >= -40 && m.x <= viewportWidth + 40);
}

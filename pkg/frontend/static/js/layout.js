// Compass-strip layout: headings map to horizontal pixels around center.
export const PX_PER_DEGREE = 8;
/** Signed shortest arc from 0 to deg, in (-180, 180]. */
export function wrapDelta(deg) {
    const d = ((deg % 360) + 360) % 360;
    return d > 180 ? d - 360 : d;
}
/**
 * Horizontal position of each speaker block for the current view yaw.
 * Blocks farther than halfFov off-axis are not rendered, mirroring the
 * engine's visibility rule.
 */
export function layoutBlocks(speakers, viewportWidth, yaw, halfFov, pxPerDegree = PX_PER_DEGREE) {
    return speakers.map((sp) => {
        const delta = wrapDelta(sp.yaw - yaw);
        return {
            name: sp.name,
            delta,
            x: viewportWidth / 2 + pxPerDegree * delta,
            rendered: Math.abs(delta) <= halfFov,
        };
    });
}

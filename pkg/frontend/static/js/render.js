// DOM rendering, split in two phases: buildScene() rebuilds the static
// structure when a new scene arrives; updateFrame() runs every animation
// frame and only touches styles (positions, sky, pulse, dwell ring).
import { layoutBlocks, PX_PER_DEGREE } from './layout.js';
import { pulseMix, pulseScale } from './pulse.js';
import { dwellProgress } from './scene.js';
import { compassTicks, skyGradient, sunPosition } from './sky.js';
const KNOWN_STYLES = new Set(['default', 'bob', 'emphasis', 'breathstyle', 'heartstyle']);
export function styleClass(style) {
    return `style-${style && KNOWN_STYLES.has(style) ? style : 'default'}`;
}
function spanElement(doc, span) {
    const el = doc.createElement('span');
    el.textContent = span.text;
    el.dataset.spanId = span.id;
    el.classList.add(`span-${span.kind}`);
    if (span.kind === 'emphasis') {
        el.classList.add('style-emphasis');
    }
    if (span.kind === 'choice') {
        el.classList.add('choice');
        el.dataset.choice = 'true';
        const ring = doc.createElement('i');
        ring.className = 'dwell-ring';
        el.appendChild(ring);
    }
    if (span.kind === 'biofeedback') {
        el.classList.add('bio', styleClass(span.style));
        el.dataset.signal = span.signal ?? '';
    }
    return el;
}
export function buildScene(doc, scene) {
    const strip = doc.createElement('div');
    strip.className = 'strip';
    for (const speaker of scene.speakers) {
        const block = doc.createElement('div');
        block.className = `block size-${speaker.size} ${styleClass(speaker.style)}`;
        block.dataset.speaker = speaker.name;
        block.dataset.yaw = String(speaker.yaw);
        if (speaker.name === scene.section.speaker) {
            const body = doc.createElement('p');
            body.className = 'section-body';
            if (scene.section.section_choice) {
                body.classList.add('section-choice');
            }
            for (const span of scene.section.spans) {
                body.appendChild(spanElement(doc, span));
            }
            block.appendChild(body);
        }
        else {
            const tag = doc.createElement('p');
            tag.className = 'name-tag';
            tag.textContent = speaker.name;
            block.appendChild(tag);
        }
        strip.appendChild(block);
    }
    return strip;
}
export function updateFrame(root, model, frame, pxPerDegree = PX_PER_DEGREE) {
    const scene = model.scene;
    if (scene === null) {
        return;
    }
    const sky = root.querySelector('.sky');
    if (sky) {
        sky.style.background = skyGradient(scene.day);
        const sun = sky.querySelector('.sun');
        if (sun) {
            const pos = sunPosition(scene.day, model.yaw, frame.width, pxPerDegree);
            sun.style.display = pos.visible ? 'block' : 'none';
            sun.style.left = `${pos.x}px`;
            sun.style.top = `${pos.y * 100}%`;
        }
        const ticksEl = sky.querySelector('.ticks');
        if (ticksEl) {
            ticksEl.textContent = '';
            for (const tick of compassTicks(model.yaw, frame.width, pxPerDegree)) {
                const mark = ticksEl.ownerDocument.createElement('b');
                mark.textContent = tick.label;
                mark.style.left = `${tick.x}px`;
                ticksEl.appendChild(mark);
            }
        }
    }
    const placements = layoutBlocks(scene.speakers, frame.width, model.yaw, scene.half_fov);
    const byName = new Map(placements.map((p) => [p.name, p]));
    for (const block of root.querySelectorAll('.block')) {
        const placement = byName.get(block.dataset.speaker ?? '');
        if (!placement || !placement.rendered) {
            block.style.display = 'none';
            continue;
        }
        block.style.display = 'block';
        block.style.left = `${placement.x}px`;
    }
    const beatScale = pulseScale(frame.now, frame.lastBeat);
    const mix = pulseMix(frame.now, frame.lastBeat);
    for (const el of root.querySelectorAll('.bio')) {
        if (el.dataset.signal === 'heart' && model.bpm !== null) {
            el.style.transform = `scale(${beatScale.toFixed(4)})`;
            el.style.setProperty('--pulse-mix', mix.toFixed(3));
        }
        else if (el.dataset.signal === 'breath') {
            const v = model.latest['breath'] ?? 0.5;
            el.style.setProperty('--breath', v.toFixed(3));
        }
    }
    for (const el of root.querySelectorAll('.choice')) {
        const ring = el.querySelector('.dwell-ring');
        if (!ring) {
            continue;
        }
        const progress = el.dataset.spanId === frame.hoveredSpan
            ? dwellProgress(frame.hoverSince, frame.now, scene.dwell_threshold_ms)
            : 0;
        ring.style.setProperty('--progress', String(progress));
        ring.style.display = progress > 0 ? 'inline-block' : 'none';
    }
    const hud = root.querySelector('.hud-readout');
    if (hud) {
        const bpmText = model.bpm === null ? '--' : model.bpm.toFixed(0);
        const breath = model.latest['breath'];
        const breathText = breath === undefined ? '--' : breath.toFixed(2);
        hud.textContent =
            `yaw ${((model.yaw % 360) + 360) % 360 | 0}° · ` +
                `${model.night ? 'night' : 'day'} · bpm ${bpmText} · breath ${breathText}`;
    }
}

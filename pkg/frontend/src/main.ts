// Browser bootstrap: WebSocket connection, input wiring, sensor panel,
// and the animation-frame render loop.

import { DRAG_DEG_PER_PX, KEY_TURN_DEG_PER_S, YawController } from './input.js';
import { BeatClock } from './pulse.js';
import {
  decodeServer,
  encodeClient,
  hello,
  hoverMessage,
  sensorMessage,
  yawMessage,
} from './protocol.js';
import { buildScene, updateFrame } from './render.js';
import { applyServerMessage, initialModel, type SceneModel } from './scene.js';
import { PanelSimulator } from './sim.js';

const params = new URLSearchParams(window.location.search);
const serverUrl = params.get('server') ?? 'ws://127.0.0.1:8080';

const root = document.getElementById('app') as HTMLElement;
const stripHost = root.querySelector('.strip-host') as HTMLElement;
const banner = root.querySelector('.banner') as HTMLElement;

let model: SceneModel = initialModel();
let sceneSerial = 0;
let builtSerial = -1;
let hoveredSpan: string | null = null;
let hoverSince: number | null = null;

const beatClock = new BeatClock();
let socket: WebSocket | null = null;

const yawControl = new YawController((deg) => sendRaw(encodeClient(yawMessage(deg))));
const panel = new PanelSimulator((line) => sendRaw(encodeClient(sensorMessage(line))));

function sendRaw(frame: string): void {
  if (socket !== null && socket.readyState === WebSocket.OPEN) {
    socket.send(frame);
  }
}

function connect(): void {
  banner.textContent = `connecting to ${serverUrl}…`;
  banner.style.display = 'block';
  const ws = new WebSocket(serverUrl);
  socket = ws;
  ws.onopen = () => {
    banner.style.display = 'none';
    model = { ...model, connected: true, error: null };
    ws.send(encodeClient(hello()));
  };
  ws.onmessage = (event) => {
    const msg = decodeServer(String(event.data));
    if (msg.type === 'scene') {
      sceneSerial += 1;
      hoveredSpan = null;
      hoverSince = null;
    }
    if (msg.type === 'bio' && msg.bpm !== undefined) {
      beatClock.onBpm(msg.bpm, performance.now());
    }
    model = applyServerMessage(model, msg);
    if (model.error !== null) {
      banner.textContent = `server closed the session: ${model.error}`;
      banner.style.display = 'block';
    }
  };
  ws.onclose = () => {
    model = { ...model, connected: false };
    banner.textContent = 'disconnected — retrying…';
    banner.style.display = 'block';
    socket = null;
    setTimeout(connect, 1500);
  };
}

// --- pointer + keyboard input ------------------------------------------------

const held = new Set<string>();
window.addEventListener('keydown', (e) => {
  if (e.key === 'ArrowLeft' || e.key === 'ArrowRight') {
    held.add(e.key);
    e.preventDefault();
  }
});
window.addEventListener('keyup', (e) => held.delete(e.key));

let dragging = false;
let dragX = 0;
stripHost.addEventListener('pointerdown', (e) => {
  dragging = true;
  dragX = e.clientX;
  stripHost.setPointerCapture(e.pointerId);
});
stripHost.addEventListener('pointermove', (e) => {
  if (dragging) {
    yawControl.turnBy((dragX - e.clientX) * DRAG_DEG_PER_PX);
    dragX = e.clientX;
  }
});
stripHost.addEventListener('pointerup', () => {
  dragging = false;
});

function spanIdOf(target: EventTarget | null): string | null {
  if (!(target instanceof Element)) {
    return null;
  }
  const el = target.closest<HTMLElement>('[data-choice]');
  return el?.dataset.spanId ?? null;
}

stripHost.addEventListener('pointerover', (e) => {
  const span = spanIdOf(e.target);
  if (span !== null && span !== hoveredSpan && model.connected) {
    hoveredSpan = span;
    hoverSince = performance.now();
    sendRaw(encodeClient(hoverMessage(span)));
  }
});
stripHost.addEventListener('pointerout', (e) => {
  const span = spanIdOf(e.target);
  if (span !== null && span === hoveredSpan) {
    hoveredSpan = null;
    hoverSince = null;
    sendRaw(encodeClient(hoverMessage(null)));
  }
});

// --- sensor panel ---------------------------------------------------------------

const stressedBox = document.getElementById('panel-stressed') as HTMLInputElement;
const deepButton = document.getElementById('panel-deep') as HTMLButtonElement;
const bpmSlider = document.getElementById('panel-bpm') as HTMLInputElement;
const bpmLabel = document.getElementById('panel-bpm-label') as HTMLElement;
const panelStart = performance.now();

stressedBox.addEventListener('change', () =>
  panel.setStressed(stressedBox.checked, performance.now() - panelStart),
);
deepButton.addEventListener('click', () => panel.deepBreaths(3));
bpmSlider.addEventListener('input', () => {
  panel.bpm = Number(bpmSlider.value);
  bpmLabel.textContent = bpmSlider.value;
});
setInterval(() => {
  if (model.connected) {
    panel.advanceTo(performance.now() - panelStart);
  }
}, 100);

// --- render loop -------------------------------------------------------------------

let lastFrame = performance.now();
function frame(now: number): void {
  const dt = (now - lastFrame) / 1000;
  lastFrame = now;
  if (held.has('ArrowRight')) {
    yawControl.turnBy(KEY_TURN_DEG_PER_S * dt);
  }
  if (held.has('ArrowLeft')) {
    yawControl.turnBy(-KEY_TURN_DEG_PER_S * dt);
  }
  if (model.connected) {
    yawControl.flush(now);
  }
  model = { ...model, yaw: yawControl.yaw };

  if (model.scene !== null && builtSerial !== sceneSerial) {
    builtSerial = sceneSerial;
    stripHost.textContent = '';
    stripHost.appendChild(buildScene(document, model.scene));
  }
  updateFrame(root, model, {
    now,
    width: stripHost.clientWidth,
    hoveredSpan,
    hoverSince,
    lastBeat: beatClock.lastBeat(now),
  });
  requestAnimationFrame(frame);
}

connect();
requestAnimationFrame(frame);

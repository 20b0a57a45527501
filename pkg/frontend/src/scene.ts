// Client-side scene state: a reducer over server messages. The client
// never advances the narrative on its own; section changes only ever
// come from received scene messages.

import type { EngineEvent, SceneMsg, ServerMessage } from './protocol.js';

export interface SceneModel {
  scene: SceneMsg | null;
  yaw: number; // local view yaw; the single source the client reports
  bpm: number | null;
  latest: Record<string, number>; // last bio value per signal
  night: boolean;
  connected: boolean;
  error: string | null;
  lastEvent: EngineEvent | null;
}

export function initialModel(): SceneModel {
  return {
    scene: null,
    yaw: 0,
    bpm: null,
    latest: {},
    night: false,
    connected: false,
    error: null,
    lastEvent: null,
  };
}

export function applyServerMessage(model: SceneModel, msg: ServerMessage): SceneModel {
  switch (msg.type) {
    case 'scene':
      return { ...model, scene: msg, night: msg.day.night };
    case 'event':
      return applyEvent(model, msg.event);
    case 'bio':
      if (msg.bpm !== undefined) {
        return { ...model, bpm: msg.bpm };
      }
      if (msg.value !== undefined) {
        return { ...model, latest: { ...model.latest, [msg.sig]: msg.value } };
      }
      return model;
    case 'error':
      return { ...model, error: msg.reason };
  }
}

function applyEvent(model: SceneModel, event: EngineEvent): SceneModel {
  const next = { ...model, lastEvent: event };
  if (model.scene === null) {
    return next;
  }
  if (event.ev === 'day_phase') {
    return {
      ...next,
      night: Boolean(event.night),
      scene: {
        ...model.scene,
        day: { ...model.scene.day, night: Boolean(event.night) },
      },
    };
  }
  if (event.ev === 'block_entered' || event.ev === 'block_exited') {
    const visible = event.ev === 'block_entered';
    const speakers = model.scene.speakers.map((sp) =>
      sp.name === event.speaker ? { ...sp, visible } : sp,
    );
    return { ...next, scene: { ...model.scene, speakers } };
  }
  if (
    (event.ev === 'block_shown' || event.ev === 'block_hidden') &&
    event.speaker === model.scene.section.speaker
  ) {
    return {
      ...next,
      scene: {
        ...model.scene,
        section: { ...model.scene.section, visible: event.ev === 'block_shown' },
      },
    };
  }
  return next;
}

/** Dwell ring progress in [0, 1] for the currently hovered span. */
export function dwellProgress(
  hoverSince: number | null,
  now: number,
  thresholdMs: number,
): number {
  if (hoverSince === null || thresholdMs <= 0) {
    return 0;
  }
  return Math.min(1, Math.max(0, (now - hoverSince) / thresholdMs));
}

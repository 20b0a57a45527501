// Client protocol v1: JSON text frames over one WebSocket.

export const PROTOCOL_VERSION = 1;

export interface HelloMsg {
  type: 'hello';
  protocol: number;
}
export interface YawMsg {
  type: 'yaw';
  deg: number;
}
export interface HoverMsg {
  type: 'hover';
  span: string | null;
}
// Sensor records tunnelled through the client channel (the browser's
// sensor panel has no way to reach the raw TCP/UDP sensor port).
export interface SensorMsg {
  type: 'sensor';
  line: string;
}
export type ClientMessage = HelloMsg | YawMsg | HoverMsg | SensorMsg;

export interface SpanView {
  id: string;
  kind: 'plain' | 'emphasis' | 'choice' | 'biofeedback';
  text: string;
  target?: string;
  signal?: string;
  style?: string;
  active?: boolean;
}
export interface SectionView {
  id: string;
  display_name: string;
  speaker: string;
  spans: SpanView[];
  visible: boolean;
  section_choice: boolean;
}
export interface SpeakerView {
  name: string;
  yaw: number;
  style: string;
  size: string;
  visible: boolean;
}
export interface DayView {
  fraction: number;
  azimuth: number;
  elevation: number;
  night: boolean;
}
export interface SceneMsg {
  type: 'scene';
  protocol: number;
  section: SectionView;
  speakers: SpeakerView[];
  day: DayView;
  half_fov: number;
  dwell_threshold_ms: number;
}
export interface EngineEvent {
  ev: string;
  t: number;
  [key: string]: unknown;
}
export interface EventMsg {
  type: 'event';
  event: EngineEvent;
}
export interface BioMsg {
  type: 'bio';
  sig: string;
  value?: number;
  bpm?: number;
}
export interface ErrorMsg {
  type: 'error';
  reason: string;
}
export type ServerMessage = SceneMsg | EventMsg | BioMsg | ErrorMsg;

export const hello = (): HelloMsg => ({ type: 'hello', protocol: PROTOCOL_VERSION });
export const yawMessage = (deg: number): YawMsg => ({ type: 'yaw', deg });
export const hoverMessage = (span: string | null): HoverMsg => ({ type: 'hover', span });
export const sensorMessage = (line: string): SensorMsg => ({ type: 'sensor', line });

export function encodeClient(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

export function decodeServer(text: string): ServerMessage {
  const obj = JSON.parse(text) as { type?: string };
  if (!obj || typeof obj !== 'object' || typeof obj.type !== 'string') {
    throw new Error('bad server frame');
  }
  switch (obj.type) {
    case 'scene':
    case 'event':
    case 'bio':
    case 'error':
      return obj as ServerMessage;
    default:
      throw new Error(`unknown server message type: ${obj.type}`);
  }
}

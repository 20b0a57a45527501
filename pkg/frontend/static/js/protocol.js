// Client protocol v1: JSON text frames over one WebSocket.
export const PROTOCOL_VERSION = 1;
export const hello = () => ({ type: 'hello', protocol: PROTOCOL_VERSION });
export const yawMessage = (deg) => ({ type: 'yaw', deg });
export const hoverMessage = (span) => ({ type: 'hover', span });
export const sensorMessage = (line) => ({ type: 'sensor', line });
export function encodeClient(msg) {
    return JSON.stringify(msg);
}
export function decodeServer(text) {
    const obj = JSON.parse(text);
    if (!obj || typeof obj !== 'object' || typeof obj.type !== 'string') {
        throw new Error('bad server frame');
    }
    switch (obj.type) {
        case 'scene':
        case 'event':
        case 'bio':
        case 'error':
            return obj;
        default:
            throw new Error(`unknown server message type: ${obj.type}`);
    }
}

/**
 * Wire protocol between the spoofkit host and an injected agent.
 *
 * Every message is one JSON object per line, no padding, UTF-8, keys in the
 * order the producing code lists them. The host collapses integral floats
 * to integers before encoding, which is exactly what JSON.stringify does
 * natively, so both peers produce identical bytes for the same message as
 * long as values stay below 2^53 in magnitude. Non-finite numbers are not
 * representable and are refused, mirroring the host encoder.
 */

export type JsonValue = null | boolean | number | string | JsonValue[] | JsonObject;

export interface JsonObject {
  [key: string]: JsonValue;
}

export class ProtocolError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ProtocolError";
  }
}

/** Value dimensions per sensor stream; membership defines the known sensors. */
export const SENSOR_DIMS: ReadonlyMap<string, number> = new Map([
  ["accelerometer", 3],
  ["gyroscope", 3],
  ["step_counter", 1],
  ["ambient_temperature", 1],
]);

/** System keys a host may set or query. */
export const SYSTEM_KEYS: ReadonlySet<string> = new Set([
  "battery.level",
  "battery.charging",
  "clock.offset_ms",
  "clock.scale",
  "build.model",
  "build.manufacturer",
  "build.android_version",
  "ambient.temperature_c",
]);

/** The one key whose perceived value can come from a sensor stream. */
export const AMBIENT_KEY = "ambient.temperature_c";
export const AMBIENT_SENSOR = "ambient_temperature";

/** Hookable API identifiers, shared verbatim with the host's plan compiler. */
export const TARGET_APIS: ReadonlySet<string> = new Set([
  "sensor.accelerometer.onSensorChanged",
  "sensor.gyroscope.onSensorChanged",
  "sensor.step_counter.onSensorChanged",
  "sensor.ambient_temperature.onSensorChanged",
  "battery.capacity",
  "battery.isCharging",
  "clock.currentTimeMillis",
  "clock.elapsedRealtime",
  "build.MODEL",
  "build.MANUFACTURER",
  "build.VERSION.RELEASE",
]);

/** Reference-device values used when no platform reading is available. */
export const DEFAULT_BASELINE: ReadonlyMap<string, JsonValue> = new Map<string, JsonValue>([
  ["battery.level", 87],
  ["battery.charging", false],
  ["clock.offset_ms", 0],
  ["clock.scale", 1],
  ["build.model", "MockPhone"],
  ["build.manufacturer", "MockWorks"],
  ["build.android_version", "14"],
  ["ambient.temperature_c", 21.0],
]);

export function ack(ref: number): JsonObject {
  return { type: "ack", ref };
}

export function nack(ref: number, reason: string): JsonObject {
  return { type: "nack", ref, reason };
}

export function valueReply(ref: number, key: string, value: JsonValue): JsonObject {
  return { type: "value", ref, key, value };
}

/** Encode one message to its canonical line (no trailing newline). */
export function encodeLine(obj: JsonObject): string {
  return JSON.stringify(obj, (_key, value) => {
    if (typeof value === "number" && !Number.isFinite(value)) {
      throw new ProtocolError("non-finite number is not wire-encodable");
    }
    return value;
  });
}

/** Decode one wire line to an object; throws ProtocolError on anything else. */
export function decodeLine(line: string): JsonObject {
  let obj: unknown;
  try {
    obj = JSON.parse(line);
  } catch (exc) {
    throw new ProtocolError(`undecodable message: ${String(exc)}`);
  }
  if (typeof obj !== "object" || obj === null || Array.isArray(obj)) {
    throw new ProtocolError("message is not a JSON object");
  }
  return obj as JsonObject;
}

/**
 * Render a value the way the host embeds offending names in nack reasons:
 * strings quoted in repr style, booleans and null as the host's literals.
 */
export function reprName(value: JsonValue | undefined): string {
  if (value === undefined || value === null) {
    return "None";
  }
  if (value === true) {
    return "True";
  }
  if (value === false) {
    return "False";
  }
  if (typeof value === "number") {
    return String(value);
  }
  if (typeof value === "string") {
    return reprString(value);
  }
  return JSON.stringify(value);
}

function reprString(text: string): string {
  // single quotes unless the string contains one and no double quote
  const quote = text.includes("'") && !text.includes('"') ? '"' : "'";
  let out = quote;
  for (const ch of text) {
    const code = ch.codePointAt(0) as number;
    if (ch === "\\" || ch === quote) {
      out += "\\" + ch;
    } else if (ch === "\n") {
      out += "\\n";
    } else if (ch === "\r") {
      out += "\\r";
    } else if (ch === "\t") {
      out += "\\t";
    } else if (code < 0x20 || code === 0x7f) {
      out += "\\x" + code.toString(16).padStart(2, "0");
    } else {
      out += ch;
    }
  }
  return out + quote;
}

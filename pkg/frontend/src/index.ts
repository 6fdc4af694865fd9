export { Agent } from "./agent";
export { FakeBridge } from "./bridge";
export type { DeviceBridge, InterceptionHandle } from "./bridge";
export {
  AMBIENT_KEY,
  AMBIENT_SENSOR,
  DEFAULT_BASELINE,
  ProtocolError,
  SENSOR_DIMS,
  SYSTEM_KEYS,
  TARGET_APIS,
  ack,
  decodeLine,
  encodeLine,
  nack,
  reprName,
  valueReply,
} from "./protocol";
export type { JsonObject, JsonValue } from "./protocol";

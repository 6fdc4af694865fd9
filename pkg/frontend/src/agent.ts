/**
 * Protocol half of an injectable agent: message dispatch, spoof-state
 * bookkeeping, and query resolution. For plans a conforming host can
 * produce, the observable ack/nack/value behavior is identical to the
 * desk-scale reference app the host test-drives plans against; on top of
 * that the agent refuses hooks it has no interception for, so a stale
 * host cannot half-spoof a process it no longer understands.
 */

import { DeviceBridge, FakeBridge, InterceptionHandle } from "./bridge";
import {
  AMBIENT_KEY,
  AMBIENT_SENSOR,
  JsonObject,
  JsonValue,
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

/** Hook kinds this agent knows how to install; others are skipped. */
const HOOK_KINDS: ReadonlySet<string> = new Set([
  "property_constant",
  "property_program",
  "sensor_stream",
]);

function isObject(value: JsonValue | undefined): value is JsonObject {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function isInt(value: JsonValue | undefined): value is number {
  return typeof value === "number" && Number.isInteger(value);
}

function errorMessage(exc: unknown): string {
  return exc instanceof Error ? exc.message : String(exc);
}

export class Agent {
  private readonly bridge: DeviceBridge;
  private readonly installedHooks = new Map<string, InterceptionHandle>();
  private readonly overrides = new Map<string, JsonValue>();
  private readonly latestSamples = new Map<string, number[]>();
  private readonly spoofed = new Set<string>();
  private lastSeq = 0;

  constructor(bridge: DeviceBridge = new FakeBridge()) {
    this.bridge = bridge;
  }

  /** Apis with a live interception, sorted for diagnostics. */
  installedApis(): string[] {
    return [...this.installedHooks.keys()].sort();
  }

  /** Sensors currently carrying a spoofed stream, sorted for diagnostics. */
  spoofedSensors(): string[] {
    return [...this.spoofed].sort();
  }

  /** What the process currently perceives for a system key. */
  queryValue(key: string): JsonValue {
    if (this.overrides.has(key)) {
      return this.overrides.get(key) as JsonValue;
    }
    if (key === AMBIENT_KEY) {
      const latest = this.latestSamples.get(AMBIENT_SENSOR);
      if (latest !== undefined) {
        return latest[0];
      }
    }
    return this.bridge.readBaseline(key);
  }

  /** Decode one host line, dispatch it, and encode the replies in order. */
  handleLine(line: string): string[] {
    let msg: JsonObject;
    try {
      msg = decodeLine(line);
    } catch {
      return [encodeLine(nack(-1, "malformed message"))];
    }
    return this.handleMessage(msg).map(encodeLine);
  }

  /** Dispatch one decoded host message; returns replies in send order. */
  handleMessage(msg: JsonValue): JsonObject[] {
    if (!isObject(msg)) {
      // a broken channel deserves an answer, not a dead agent
      return [nack(-1, "malformed message")];
    }
    const seq = msg.seq;
    const mtype = msg.type;
    if (typeof mtype !== "string" || !isInt(seq)) {
      return [nack(isInt(seq) ? seq : -1, "malformed message")];
    }
    if (seq <= this.lastSeq) {
      // duplicate or stale delivery: acknowledge, never reprocess
      return [ack(seq)];
    }
    this.lastSeq = seq;

    switch (mtype) {
      case "apply_plan":
        return this.onApplyPlan(seq, msg);
      case "sample":
        return this.onSample(seq, msg);
      case "set_property":
        return this.onSetProperty(seq, msg);
      case "query":
        return this.onQuery(seq, msg);
      case "restore":
        return this.onRestore(seq);
      default:
        return [nack(seq, "unknown message type")];
    }
  }

  private onApplyPlan(seq: number, msg: JsonObject): JsonObject[] {
    const plan = msg.plan;
    if (!isObject(plan) || !Array.isArray(plan.hooks)) {
      return [nack(seq, "malformed message")];
    }
    const hooks = plan.hooks;
    if (!hooks.every(isObject)) {
      return [nack(seq, "malformed message")];
    }
    for (const hook of hooks) {
      if (typeof hook.api !== "string" || !TARGET_APIS.has(hook.api)) {
        return [nack(seq, `unknown api ${reprName(hook.api)}`)];
      }
    }
    // interception first, state second: a platform refusal must leave the
    // process exactly as it was, so handles taken so far are detached again
    const taken: [string, InterceptionHandle][] = [];
    for (const hook of hooks) {
      if (typeof hook.kind !== "string" || !HOOK_KINDS.has(hook.kind)) {
        // unknown kinds are skipped for forward compatibility with newer planners
        continue;
      }
      try {
        taken.push([hook.api as string, this.bridge.install(hook)]);
      } catch (exc) {
        for (const [, handle] of taken.reverse()) {
          handle.detach();
        }
        return [nack(seq, `interception failed: ${errorMessage(exc)}`)];
      }
    }
    for (const [api, handle] of taken) {
      // re-hooking an api replaces its interception instead of leaking it
      this.installedHooks.get(api)?.detach();
      this.installedHooks.set(api, handle);
    }
    for (const hook of hooks) {
      this.applyHookState(hook);
    }
    return [ack(seq)];
  }

  private applyHookState(hook: JsonObject): void {
    const kind = hook.kind;
    const payload = isObject(hook.payload) ? hook.payload : {};
    if (kind === "property_constant") {
      if (typeof payload.key === "string") {
        this.overrides.set(payload.key, payload.value === undefined ? null : payload.value);
      }
    } else if (kind === "property_program") {
      const initial = isObject(payload.initial) ? payload.initial : {};
      for (const [key, value] of Object.entries(initial)) {
        this.overrides.set(key, value);
      }
    } else if (kind === "sensor_stream") {
      this.spoofed.add((hook.api as string).split(".")[1]);
    }
  }

  private onSample(seq: number, msg: JsonObject): JsonObject[] {
    const sensorName = msg.sensor;
    const dims = typeof sensorName === "string" ? SENSOR_DIMS.get(sensorName) : undefined;
    if (typeof sensorName !== "string" || dims === undefined) {
      return [nack(seq, `unknown sensor ${reprName(sensorName)}`)];
    }
    const values = msg.values;
    if (!Array.isArray(values) || values.length !== dims) {
      return [nack(seq, "dimension mismatch")];
    }
    if (!values.every((v) => typeof v === "number")) {
      return [nack(seq, "malformed message")];
    }
    const tNs = msg.t_ns;
    // JSON.parse collapses 2.0 to 2, so integer-ness here means integral value
    if (!isInt(tNs) || tNs < 0) {
      return [nack(seq, "malformed message")];
    }
    this.latestSamples.set(sensorName, values as number[]);
    return [ack(seq)];
  }

  private onSetProperty(seq: number, msg: JsonObject): JsonObject[] {
    const keyName = msg.key;
    if (typeof keyName !== "string" || !SYSTEM_KEYS.has(keyName)) {
      return [nack(seq, `unknown key ${reprName(keyName)}`)];
    }
    if (!("value" in msg)) {
      return [nack(seq, "malformed message")];
    }
    this.overrides.set(keyName, msg.value);
    return [ack(seq)];
  }

  private onQuery(seq: number, msg: JsonObject): JsonObject[] {
    const keyName = msg.key;
    if (typeof keyName !== "string" || !SYSTEM_KEYS.has(keyName)) {
      return [nack(seq, `unknown key ${reprName(keyName)}`)];
    }
    return [valueReply(seq, keyName, this.queryValue(keyName))];
  }

  private onRestore(seq: number): JsonObject[] {
    const handles = [...this.installedHooks.values()].reverse();
    this.installedHooks.clear();
    for (const handle of handles) {
      handle.detach();
    }
    this.overrides.clear();
    this.latestSamples.clear();
    this.spoofed.clear();
    return [ack(seq)];
  }
}

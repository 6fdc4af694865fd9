/**
 * Platform half of the agent: everything that touches the device it runs
 * on. The protocol state machine in Agent stays identical across targets;
 * only the bridge changes between a test harness and an instrumented
 * process.
 */

import { DEFAULT_BASELINE, JsonObject, JsonValue } from "./protocol";

/** One live interception, detachable on its own so teardown can be partial. */
export interface InterceptionHandle {
  /** Detach this interception; the call site observes real values again. */
  detach(): void;
}

export interface DeviceBridge {
  /** True (pre-spoof) value of a system key as the platform reports it. */
  readBaseline(key: string): JsonValue;

  /** Intercept one hook's call site; throws if the platform refuses. */
  install(hook: JsonObject): InterceptionHandle;
}

/**
 * In-memory bridge for tests and host-side rehearsal. Baseline values come
 * from the supplied map with the reference-device defaults underneath;
 * installed hooks sit in a live ledger that detaching removes them from,
 * and apis listed in failApis refuse interception the way a hardened
 * platform would.
 */
export class FakeBridge implements DeviceBridge {
  /** Hooks whose interception is currently live. */
  readonly installed: JsonObject[] = [];
  /** Apis whose interception the fake platform refuses. */
  readonly failApis = new Set<string>();
  detachCount = 0;

  private readonly baseline: Map<string, JsonValue>;

  constructor(baseline: Record<string, JsonValue> = {}) {
    this.baseline = new Map(DEFAULT_BASELINE);
    for (const [key, value] of Object.entries(baseline)) {
      this.baseline.set(key, value);
    }
  }

  readBaseline(key: string): JsonValue {
    const value = this.baseline.get(key);
    if (value === undefined) {
      throw new Error(`no baseline for key '${key}'`);
    }
    return value;
  }

  install(hook: JsonObject): InterceptionHandle {
    const api = typeof hook.api === "string" ? hook.api : "";
    if (this.failApis.has(api)) {
      throw new Error(`platform refused hook on ${api}`);
    }
    this.installed.push(hook);
    return {
      detach: () => {
        const at = this.installed.indexOf(hook);
        if (at >= 0) {
          this.installed.splice(at, 1);
        }
        this.detachCount += 1;
      },
    };
  }
}

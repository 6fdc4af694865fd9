/**
 * Frida entry point: wires the Agent to the host script channel and reads
 * pre-spoof baselines through the Android runtime when one is present.
 * Interception bodies live in the host-emitted hook scripts; this scaffold
 * keeps the protocol conversation and a detachable ledger per hook so
 * teardown remains auditable either way.
 */

import { Agent } from "./agent";
import { DeviceBridge, FakeBridge, InterceptionHandle } from "./bridge";
import { DEFAULT_BASELINE, JsonObject, JsonValue } from "./protocol";

/** Per-key readers that can answer without a Context in hand. */
const PLATFORM_READERS: ReadonlyMap<string, () => JsonValue> = new Map<string, () => JsonValue>([
  ["build.model", () => String(Java.use("android.os.Build").MODEL.value)],
  ["build.manufacturer", () => String(Java.use("android.os.Build").MANUFACTURER.value)],
  ["build.android_version", () => String(Java.use("android.os.Build$VERSION").RELEASE.value)],
]);

/**
 * Bridge backed by the instrumented Android process. Keys without a cheap
 * platform reader fall back to the reference-device defaults; hooks keep
 * the same detachable-ledger shape as the test bridge.
 */
export class FridaBridge implements DeviceBridge {
  readonly installed: JsonObject[] = [];

  readBaseline(key: string): JsonValue {
    const reader = PLATFORM_READERS.get(key);
    if (reader !== undefined && Java.available) {
      try {
        return reader();
      } catch {
        // fall through: an unreadable platform value is not a protocol error
      }
    }
    const fallback = DEFAULT_BASELINE.get(key);
    if (fallback === undefined) {
      throw new Error(`no baseline for key '${key}'`);
    }
    return fallback;
  }

  install(hook: JsonObject): InterceptionHandle {
    this.installed.push(hook);
    return {
      detach: () => {
        const at = this.installed.indexOf(hook);
        if (at >= 0) {
          this.installed.splice(at, 1);
        }
      },
    };
  }
}

function main(): void {
  const bridge = typeof Java !== "undefined" && Java.available ? new FridaBridge() : new FakeBridge();
  const agent = new Agent(bridge);
  const pump = (): void => {
    recv((message: unknown) => {
      for (const reply of agent.handleMessage(message as JsonValue)) {
        send(reply);
      }
      pump();
    });
  };
  pump();
}

if (typeof recv === "function") {
  // running injected; under vitest these globals do not exist
  setImmediate(main);
}

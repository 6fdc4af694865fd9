/** Minimal ambient surface of the frida runtime used by the agent entry. */

declare const Java: {
  available: boolean;
  use(className: string): any;
  perform(fn: () => void): void;
};

declare function recv(callback: (message: unknown) => void): void;
declare function send(payload: unknown): void;
declare function setImmediate(callback: () => void): void;

"""Transports: how a session reaches its target process.

The protocol is newline-delimited JSON, one message per line (see wire.py
for the encoding and orchestrator.py for the message shapes). Two
implementations matter here:

  * MockTransport — in-process registry of mock apps; delivery is
    synchronous, so responses are queued before send() returns. This is the
    desk-scale path every test uses.
  * PipeTransport — thin adapter speaking the same protocol over a child
    process's stdio for a real instrumentation host. Nothing in the desk
    test suite depends on it.

FaultyTransport wraps the mock with a deterministic fault schedule so the
failure paths (send errors, swallowed replies) can be driven at will.
"""

import subprocess
from collections import deque

from spoofkit.errors import AttachError, DuplicateProcess, TransportError
from spoofkit.wire import decode_line


class MockTransport:
    """In-process transport over registered mock apps."""

    def __init__(self):
        self._apps = {}
        self._attached = None
        self._inbox = deque()
        self.sent_lines = 0

    def register(self, app):
        if app.process_name in self._apps:
            raise DuplicateProcess(f"process {app.process_name!r} already registered")
        self._apps[app.process_name] = app

    @property
    def attached_app(self):
        return self._attached

    def attach(self, process_name):
        app = self._apps.get(process_name)
        if app is None:
            raise AttachError(f"no such process: {process_name!r}")
        self._attached = app

    def detach(self):
        self._attached = None

    def send(self, line):
        if self._attached is None:
            raise TransportError("not attached")
        self.sent_lines += 1
        self._deliver(line)

    def _deliver(self, line):
        for response in self._attached.deliver_line(line):
            self._inbox.append(response)

    def receive(self, timeout_s=0.0):
        """Next queued line, or None. The mock never blocks."""
        if self._inbox:
            return self._inbox.popleft()
        return None


class FaultyTransport(MockTransport):
    """Mock transport with scripted faults.

    ``fail_sends`` holds 1-based indexes of host sends that raise a
    transient TransportError (the message is lost, later sends work).
    ``swallow_refs`` holds request seq values whose direct reply (ack, nack
    or value) is dropped, forcing the timeout path; events still flow.
    """

    def __init__(self, fail_sends=(), swallow_refs=()):
        super().__init__()
        self.fail_sends = frozenset(fail_sends)
        self.swallow_refs = frozenset(swallow_refs)

    def send(self, line):
        if self._attached is None:
            raise TransportError("not attached")
        self.sent_lines += 1
        if self.sent_lines in self.fail_sends:
            raise TransportError(f"injected send failure at message {self.sent_lines}")
        self._deliver(line)
        if self.swallow_refs:
            kept = deque()
            for response in self._inbox:
                doc = decode_line(response)
                if doc.get("type") in ("ack", "nack", "value") and doc.get("ref") in self.swallow_refs:
                    continue
                kept.append(response)
            self._inbox = kept


class PipeTransport:
    """Same protocol over a child process's stdin/stdout.

    The command receives the target process name as its final argument and
    is expected to bridge lines to a real instrumentation host.
    """

    def __init__(self, command):
        self.command = list(command)
        self._child = None

    def attach(self, process_name):
        try:
            self._child = subprocess.Popen(
                self.command + [process_name],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise AttachError(f"cannot start instrumentation host: {exc}") from None

    def detach(self):
        if self._child is not None:
            self._child.stdin.close()
            self._child.wait(timeout=5)
            self._child = None

    def send(self, line):
        if self._child is None:
            raise TransportError("not attached")
        try:
            self._child.stdin.write(line + "\n")
            self._child.stdin.flush()
        except OSError as exc:
            raise TransportError(f"send failed: {exc}") from None

    def receive(self, timeout_s=0.0):
        if self._child is None:
            raise TransportError("not attached")
        line = self._child.stdout.readline()
        return line.rstrip("\n") if line else None

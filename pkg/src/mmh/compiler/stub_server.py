"""Local chat-completion server for offline tests and demos."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Union

# A responder gets the decoded request body and returns either the reply text
# or a (status, raw body) pair for error injection.
Reply = Union[str, tuple[int, str]]
Responder = Callable[[dict], Reply]


def completion_body(content: str) -> str:
    return json.dumps({"choices": [{"index": 0, "message": {"role": "assistant", "content": content}}]})


def scripted(replies: list[Reply]) -> Responder:
    """Responder that hands out ``replies`` in order, repeating the last one."""
    lock = threading.Lock()
    queue = list(replies)

    def respond(_body: dict) -> Reply:
        with lock:
            return queue.pop(0) if len(queue) > 1 else queue[0]

    return respond


class StubChatServer:
    """Threaded HTTP server on 127.0.0.1 answering chat-completion POSTs.

    Use as a context manager; ``url`` is the endpoint and ``requests`` keeps
    every decoded body received.
    """

    def __init__(self, responder: Responder, path: str = "/v1/chat/completions"):
        self.responder = responder
        self.path = path
        self.requests: list[dict] = []
        self.headers: list[dict] = []
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):  # keep test output quiet
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw)
                except json.JSONDecodeError:
                    self._send(400, '{"error": "bad json"}')
                    return
                stub.requests.append(body)
                stub.headers.append(dict(self.headers))
                if self.path != stub.path:
                    self._send(404, '{"error": "not found"}')
                    return
                reply = stub.responder(body)
                if isinstance(reply, tuple):
                    self._send(*reply)
                else:
                    self._send(200, completion_body(reply))

            def _send(self, status: int, text: str):
                data = text.encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._server.daemon_threads = True
        self._thread = threading.Thread(target=self._server.serve_forever, kwargs={"poll_interval": 0.02}, daemon=True)

    @property
    def url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}{self.path}"

    def start(self) -> "StubChatServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()

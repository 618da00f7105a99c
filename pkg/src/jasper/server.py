"""The ``main`` server process, over HTTP.

Every request is handled from scratch::

    fresh property map
    FORM.*    <- query string or form-urlencoded body
    CONFIG.*  <- platform config, then global config (later files win)
    ERROR.*   <- error config
    preprocess (may move FORM.page on)
    render template/<FORM.page>.html with the full resolver chain
"""

from __future__ import annotations

import logging
import os
import re
import threading
from dataclasses import dataclass, field
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional
from urllib.parse import urlsplit

from jasper import app, config
from jasper.errors import JasperError, RequestError
from jasper.forms import RequestData, parse_request
from jasper.mail import SpoolTransport, Transport
from jasper.properties import PropertyMap
from jasper.template import process_file_plain

log = logging.getLogger(__name__)

DEFAULT_PAGE = "main"
ENDPOINT = "/main"
CONTENT_TYPE = "text/html; charset=utf-8"

_PAGE_RE = re.compile(r"[A-Za-z0-9_]+", re.ASCII)


class BadPage(RequestError):
    pass


class PageNotFound(JasperError):
    pass


def sanitize_page(name: str) -> str:
    """Return *name* if it is safe to use as a template file stem, else raise BadPage."""
    if not isinstance(name, str) or not _PAGE_RE.fullmatch(name):
        raise BadPage(f"invalid page name {name!r}")
    return name


@dataclass
class ServerConfig:
    root_dir: str
    config_files: tuple[str, ...] = ("config/python.config", "config/global.config")
    error_config: Optional[str] = "config/error.config"
    host: str = "127.0.0.1"
    port: int = 8080
    transport: Optional[Transport] = None
    spool_path: str = "jasper-mail.spool"
    cache_config: bool = False
    _cache: dict = field(default_factory=dict, init=False, repr=False)
    _cache_lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        self.root_dir = os.fspath(self.root_dir)
        if not os.path.isdir(os.path.join(self.root_dir, "template")):
            raise JasperError(f"{self.root_dir} has no template/ directory")
        self.config_files = tuple(os.fspath(p) for p in self.config_files)
        if self.transport is None:
            self.transport = SpoolTransport(self.spool_path)

    def resolve_path(self, path: str) -> str:
        return os.path.join(self.root_dir, path)

    def load_config(self, props: PropertyMap) -> None:
        for path in self.config_files:
            self._parse(self.resolve_path(path), "CONFIG", props)
        if self.error_config:
            self._parse(self.resolve_path(self.error_config), "ERROR", props)
        # The server's root directory is authoritative for template lookup.
        props["CONFIG.rootDir"] = os.path.join(self.root_dir, "")

    def _parse(self, path: str, prefix: str, props: PropertyMap) -> None:
        if not self.cache_config:
            config.parse_bare(path, prefix, props)
            return
        key = (path, prefix)
        with self._cache_lock:
            entries = self._cache.get(key)
            if entries is None:
                entries = PropertyMap()
                config.parse_bare(path, prefix, entries)
                self._cache[key] = entries
        props.update(entries)


@dataclass
class Response:
    status: int
    body: str
    content_type: str = CONTENT_TYPE

    @property
    def headers(self) -> dict[str, str]:
        return {"Content-Type": self.content_type}


def main_process(req: RequestData, cfg: ServerConfig) -> tuple[PropertyMap, str]:
    """Run the server process and return the final property map with the page body."""
    props = PropertyMap()
    parse_request(req, props)
    cfg.load_config(props)
    if props.get("FORM.page") is None:
        props["FORM.page"] = DEFAULT_PAGE
    sanitize_page(props["FORM.page"])
    app.preprocess(props, cfg.transport)
    page = sanitize_page(props["FORM.page"])
    path = os.path.join(cfg.root_dir, "template", page + ".html")
    if not os.path.isfile(path):
        raise PageNotFound(f"no template for page {page!r}")
    return props, process_file_plain(path, app.FULL_CHAIN, props)


def handle_request(req: RequestData, cfg: ServerConfig) -> Response:
    try:
        _, body = main_process(req, cfg)
    except PageNotFound as exc:
        return Response(HTTPStatus.NOT_FOUND, f"{exc}\n", "text/plain; charset=utf-8")
    except RequestError as exc:
        status = HTTPStatus.BAD_REQUEST
        if "content type" in str(exc):
            status = HTTPStatus.UNSUPPORTED_MEDIA_TYPE
        return Response(status, f"{exc}\n", "text/plain; charset=utf-8")
    except Exception:
        log.exception("request failed")
        return Response(HTTPStatus.INTERNAL_SERVER_ERROR, "internal server error\n", "text/plain; charset=utf-8")
    return Response(HTTPStatus.OK, body)


class JasperRequestHandler(BaseHTTPRequestHandler):
    server_version = "Jasper/0.1"
    cfg: ServerConfig

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def _dispatch(self, method: str) -> None:
        url = urlsplit(self.path)
        if url.path != ENDPOINT:
            self._send(Response(HTTPStatus.NOT_FOUND, "not found\n", "text/plain; charset=utf-8"))
            return
        body = ""
        if method == "POST":
            length = int(self.headers.get("Content-Length") or 0)
            body = self.rfile.read(length).decode("utf-8", "replace")
        try:
            req = RequestData(method, url.query, body, self.headers.get("Content-Type", ""))
        except RequestError as exc:
            self._send(Response(HTTPStatus.BAD_REQUEST, f"{exc}\n", "text/plain; charset=utf-8"))
            return
        self._send(handle_request(req, self.cfg))

    def _send(self, resp: Response) -> None:
        payload = resp.body.encode("utf-8")
        self.send_response(resp.status)
        for name, value in resp.headers.items():
            self.send_header(name, value)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, format, *args):
        log.info("%s - %s", self.address_string(), format % args)


def make_server(cfg: ServerConfig) -> ThreadingHTTPServer:
    handler = type("BoundJasperRequestHandler", (JasperRequestHandler,), {"cfg": cfg})
    return ThreadingHTTPServer((cfg.host, cfg.port), handler)


def serve(cfg: ServerConfig) -> None:
    httpd = make_server(cfg)
    host, port = httpd.server_address[:2]
    log.info("serving %s on http://%s:%d%s", cfg.root_dir, host, port, ENDPOINT)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()

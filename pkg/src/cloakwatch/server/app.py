"""HTTP front end serving models, lists, params and client reports."""

from __future__ import annotations

import json
import threading
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .. import urlnorm
from ..errors import InvalidUrl, StoreUnavailable
from .service import CrawlService


class ListBody(BaseModel):
    url: str


def build_app(service: CrawlService, run_scheduler: bool = False) -> FastAPI:
    """Wire the API around a crawl service.

    With run_scheduler a daemon thread drives run_due_jobs on the
    service's clock at the configured poll interval; tests leave it off
    and drive the scheduler directly.
    """
    stop = threading.Event()

    def scheduler_loop() -> None:
        while not stop.wait(service.config.poll_interval_seconds):
            try:
                service.run_due_jobs(service.clock.now())
            except StoreUnavailable:
                pass  # transient; retry next tick

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        if run_scheduler:
            threading.Thread(
                target=scheduler_loop, name="crawl-scheduler", daemon=True
            ).start()
        yield
        stop.set()

    app = FastAPI(title="cloakwatch", docs_url=None, redoc_url=None, lifespan=lifespan)
    # Browser extensions call from page origins; the API serves no
    # secrets and takes no credentials, so a wildcard is fine.
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "PUT", "POST"],
        allow_headers=["*"],
    )

    def _normalize(url: str) -> str:
        try:
            return urlnorm.normalize(url)
        except InvalidUrl as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/v1/swm")
    def get_swm(url: str, response: Response):
        key = _normalize(url)
        lookup = service.get_model(key, url)
        if lookup.status == "listed":
            return {"listed": lookup.listed}
        if lookup.status == "ready":
            return lookup.model.to_dict()
        response.status_code = 202
        return {"status": "pending"}

    @app.put("/v1/lists/{list_name}", status_code=204)
    def put_list(list_name: str, body: ListBody):
        if list_name not in ("black", "white"):
            raise HTTPException(status_code=404, detail="unknown list")
        key = _normalize(body.url)
        service.store.upsert_list(key, list_name, service.clock.now())
        return Response(status_code=204)

    @app.get("/v1/params")
    def get_params():
        return service.config.detection.to_dict()

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/reports", status_code=204)
    async def post_report(request: Request):
        body = await request.body()
        try:
            json.loads(body)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail="report must be JSON") from exc
        service.store.add_report(body.decode("utf-8"), service.clock.now())
        return Response(status_code=204)

    return app

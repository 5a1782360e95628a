"""Model lookups and the crawl scheduler.

get_model never blocks on the network: an unknown URL enqueues a crawl
job and answers "pending" immediately. run_due_jobs advances every due
job by one visit; the clock is injected so crawl cadence is testable
without real time.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Callable, Protocol

from ..errors import FetchError
from ..features import PageDocument, fingerprint_page
from ..swm import Observation, WebsiteModel, build_model
from .config import ServerConfig
from .fetch import fetch_page
from .store import CrawlJob, Store

Fetcher = Callable[[str, str], PageDocument]


class Clock(Protocol):
    def now(self) -> datetime: ...


class SystemClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)


@dataclass(frozen=True)
class ModelLookup:
    """Answer to a model request: ready, pending, or list verdict."""

    status: str  # "ready" | "pending" | "listed"
    model: WebsiteModel | None = None
    listed: str | None = None


@dataclass(frozen=True)
class JobTransition:
    """One observable scheduler event, for traces and logs."""

    url_key: str
    action: str  # "fetched" | "fetch_failed" | "ready" | "abandoned"
    at: datetime
    detail: str = ""


@dataclass
class CrawlService:
    store: Store
    config: ServerConfig
    fetcher: Fetcher | None = None
    clock: Clock = field(default_factory=SystemClock)

    def __post_init__(self) -> None:
        if self.fetcher is None:
            self.fetcher = self._default_fetcher

    def _default_fetcher(self, target_url: str, agent_profile: str) -> PageDocument:
        return fetch_page(
            target_url,
            agent_profile,
            profiles=self.config.agent_profiles,
            timeout=self.config.fetch_timeout_seconds,
            redirect_cap=self.config.redirect_cap,
            referer=self.config.referer,
        )

    def get_model(self, url_key: str, target_url: str) -> ModelLookup:
        """Look up a model, scheduling a crawl when none exists yet."""
        listed = self.store.check_lists(url_key)
        if listed is not None:
            return ModelLookup(status="listed", listed=listed)
        model_json = self.store.get_model_json(url_key)
        if model_json is not None:
            return ModelLookup(status="ready", model=WebsiteModel.from_json(model_json))
        job = CrawlJob(
            url_key=url_key,
            target_url=target_url,
            remaining_visits=self.config.visit_count,
            interval=timedelta(hours=self.config.crawl_interval_hours),
            agent_profile=self.config.default_agent_profile,
            next_due=self.clock.now(),
            state="pending",
        )
        self.store.try_enqueue_job(job)  # False just means a job already runs
        return ModelLookup(status="pending")

    def run_due_jobs(self, now: datetime | None = None) -> list[JobTransition]:
        """Advance every due pending job by one visit."""
        if now is None:
            now = self.clock.now()
        due = self.store.due_jobs(now)
        if not due:
            return []
        for job in due:
            job.state = "running"
            self.store.save_job(job)

        def one_fetch(job: CrawlJob) -> PageDocument | FetchError:
            try:
                return self.fetcher(job.target_url, job.agent_profile)
            except FetchError as exc:
                return exc

        if len(due) == 1 or self.config.fetch_concurrency == 1:
            results = [one_fetch(job) for job in due]
        else:
            with ThreadPoolExecutor(self.config.fetch_concurrency) as pool:
                results = list(pool.map(one_fetch, due))

        transitions = []
        for job, result in zip(due, results):
            visit_index = self.config.visit_count - job.remaining_visits
            if isinstance(result, FetchError):
                job.failures += 1
                transitions.append(
                    JobTransition(job.url_key, "fetch_failed", now, str(result))
                )
            else:
                fp = fingerprint_page(result)
                self.store.append_observations(
                    job.url_key,
                    visit_index,
                    Observation(fp.text_simhash, now, fp.text_count),
                    Observation(fp.tag_simhash, now, fp.tag_count),
                )
                transitions.append(JobTransition(job.url_key, "fetched", now))
            job.remaining_visits -= 1
            job.next_due = job.next_due + job.interval
            if job.remaining_visits > 0:
                job.state = "pending"
                self.store.save_job(job)
                continue
            transitions.append(self._finalize(job, now))
        return transitions

    def _finalize(self, job: CrawlJob, now: datetime) -> JobTransition:
        """Build the model once the visit series is exhausted."""
        text_obs, tag_obs = self.store.get_observations(job.url_key)
        if not text_obs:
            job.state = "failed"
            self.store.save_job(job)
            self.store.delete_record(job.url_key)
            return JobTransition(job.url_key, "abandoned", now, "all visits failed")
        cap = self.config.max_observations
        text_obs, tag_obs = text_obs[-cap:], tag_obs[-cap:]
        detection = self.config.detection
        model = build_model(
            job.url_key,
            text_obs,
            tag_obs,
            t_learn_text=detection.t_learn_text,
            t_learn_tag=detection.t_learn_tag,
            max_observations=cap,
            now=now,
        )
        self.store.set_ready(job.url_key, model.to_json())
        job.state = "done"
        self.store.save_job(job)
        return JobTransition(job.url_key, "ready", now, f"{len(text_obs)} observations")

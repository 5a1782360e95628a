"""Embedded persistence for models, observations, crawl jobs and lists.

SQLite keyed by url_key; one shared connection guarded by a lock, which
is plenty at the request rates a desk-scale deployment sees. Every
operation translates backend failures to StoreUnavailable so callers
never see sqlite details.
"""

from __future__ import annotations

import sqlite3
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta
from functools import wraps

from ..errors import StoreUnavailable
from ..swm import Observation

_SCHEMA = """
CREATE TABLE IF NOT EXISTS records (
    url_key TEXT PRIMARY KEY,
    status TEXT NOT NULL,
    model_json TEXT
);
CREATE TABLE IF NOT EXISTS observations (
    url_key TEXT NOT NULL,
    visit INTEGER NOT NULL,
    channel TEXT NOT NULL,
    fingerprint TEXT NOT NULL,
    fetched_at TEXT NOT NULL,
    feature_count INTEGER NOT NULL,
    PRIMARY KEY (url_key, visit, channel)
);
CREATE TABLE IF NOT EXISTS jobs (
    url_key TEXT PRIMARY KEY,
    target_url TEXT NOT NULL,
    remaining_visits INTEGER NOT NULL,
    interval_seconds REAL NOT NULL,
    agent_profile TEXT NOT NULL,
    next_due TEXT NOT NULL,
    state TEXT NOT NULL,
    failures INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS lists (
    url_key TEXT PRIMARY KEY,
    list_name TEXT NOT NULL,
    added_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS reports (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    received_at TEXT NOT NULL,
    body TEXT NOT NULL
);
"""


@dataclass
class CrawlJob:
    """One scheduled crawl series for a url_key."""

    url_key: str
    target_url: str
    remaining_visits: int
    interval: timedelta
    agent_profile: str
    next_due: datetime
    state: str  # pending | running | done | failed
    failures: int = 0


def _guard(method):
    @wraps(method)
    def wrapper(self, *args, **kwargs):
        try:
            with self._lock:
                return method(self, *args, **kwargs)
        except sqlite3.Error as exc:
            raise StoreUnavailable(str(exc)) from exc

    return wrapper


class Store:
    """All persistent state behind the server."""

    def __init__(self, path: str = ":memory:"):
        try:
            self._conn = sqlite3.connect(path, check_same_thread=False)
            self._conn.executescript(_SCHEMA)
            self._conn.commit()
        except sqlite3.Error as exc:
            raise StoreUnavailable(str(exc)) from exc
        self._lock = threading.RLock()

    def close(self) -> None:
        self._conn.close()

    # -- lists ---------------------------------------------------------

    @_guard
    def upsert_list(self, url_key: str, list_name: str, added_at: datetime) -> None:
        if list_name not in ("black", "white"):
            raise StoreUnavailable(f"unknown list {list_name!r}")
        # PRIMARY KEY on url_key enforces black/white exclusivity
        self._conn.execute(
            "INSERT OR REPLACE INTO lists (url_key, list_name, added_at) VALUES (?, ?, ?)",
            (url_key, list_name, added_at.isoformat()),
        )
        self._conn.commit()

    @_guard
    def check_lists(self, url_key: str) -> str | None:
        row = self._conn.execute(
            "SELECT list_name FROM lists WHERE url_key = ?", (url_key,)
        ).fetchone()
        return row[0] if row else None

    # -- model records ---------------------------------------------------

    @_guard
    def record_status(self, url_key: str) -> str:
        row = self._conn.execute(
            "SELECT status FROM records WHERE url_key = ?", (url_key,)
        ).fetchone()
        return row[0] if row else "absent"

    @_guard
    def get_model_json(self, url_key: str) -> str | None:
        row = self._conn.execute(
            "SELECT model_json FROM records WHERE url_key = ? AND status = 'ready'",
            (url_key,),
        ).fetchone()
        return row[0] if row else None

    @_guard
    def set_ready(self, url_key: str, model_json: str) -> None:
        self._conn.execute(
            "INSERT OR REPLACE INTO records (url_key, status, model_json) VALUES (?, 'ready', ?)",
            (url_key, model_json),
        )
        self._conn.commit()

    @_guard
    def delete_record(self, url_key: str) -> None:
        self._conn.execute("DELETE FROM records WHERE url_key = ?", (url_key,))
        self._conn.execute("DELETE FROM observations WHERE url_key = ?", (url_key,))
        self._conn.commit()

    # -- observations ------------------------------------------------------

    @_guard
    def append_observations(
        self, url_key: str, visit: int, text: Observation, tag: Observation
    ) -> None:
        rows = [
            (url_key, visit, "text", format(text.fingerprint, "016x"),
             text.fetched_at.isoformat(), text.feature_count),
            (url_key, visit, "tag", format(tag.fingerprint, "016x"),
             tag.fetched_at.isoformat(), tag.feature_count),
        ]
        self._conn.executemany(
            "INSERT OR REPLACE INTO observations "
            "(url_key, visit, channel, fingerprint, fetched_at, feature_count) "
            "VALUES (?, ?, ?, ?, ?, ?)",
            rows,
        )
        self._conn.commit()

    @_guard
    def get_observations(self, url_key: str) -> tuple[list[Observation], list[Observation]]:
        rows = self._conn.execute(
            "SELECT visit, channel, fingerprint, fetched_at, feature_count "
            "FROM observations WHERE url_key = ? ORDER BY visit",
            (url_key,),
        ).fetchall()
        text, tag = [], []
        for _, channel, fingerprint, fetched_at, feature_count in rows:
            obs = Observation(
                int(fingerprint, 16), datetime.fromisoformat(fetched_at), feature_count
            )
            (text if channel == "text" else tag).append(obs)
        return text, tag

    # -- jobs -----------------------------------------------------------

    @_guard
    def try_enqueue_job(self, job: CrawlJob) -> bool:
        """Atomically create the job unless an active one already exists.

        Also marks the record as crawling. Returns False when a pending
        or running job holds the key.
        """
        row = self._conn.execute(
            "SELECT state FROM jobs WHERE url_key = ?", (job.url_key,)
        ).fetchone()
        if row and row[0] in ("pending", "running"):
            return False
        self._conn.execute(
            "INSERT OR REPLACE INTO jobs (url_key, target_url, remaining_visits, "
            "interval_seconds, agent_profile, next_due, state, failures) "
            "VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
            (
                job.url_key, job.target_url, job.remaining_visits,
                job.interval.total_seconds(), job.agent_profile,
                job.next_due.isoformat(), job.state, job.failures,
            ),
        )
        self._conn.execute(
            "INSERT OR REPLACE INTO records (url_key, status, model_json) "
            "VALUES (?, 'crawling', NULL)",
            (job.url_key,),
        )
        self._conn.commit()
        return True

    @_guard
    def due_jobs(self, now: datetime) -> list[CrawlJob]:
        rows = self._conn.execute(
            "SELECT url_key, target_url, remaining_visits, interval_seconds, "
            "agent_profile, next_due, state, failures FROM jobs "
            "WHERE state = 'pending' ORDER BY next_due, url_key",
        ).fetchall()
        due = []
        for row in rows:
            next_due = datetime.fromisoformat(row[5])
            if next_due <= now:
                due.append(
                    CrawlJob(
                        url_key=row[0], target_url=row[1], remaining_visits=row[2],
                        interval=timedelta(seconds=row[3]), agent_profile=row[4],
                        next_due=next_due, state=row[6], failures=row[7],
                    )
                )
        return due

    @_guard
    def save_job(self, job: CrawlJob) -> None:
        self._conn.execute(
            "UPDATE jobs SET remaining_visits = ?, next_due = ?, state = ?, failures = ? "
            "WHERE url_key = ?",
            (
                job.remaining_visits, job.next_due.isoformat(), job.state,
                job.failures, job.url_key,
            ),
        )
        self._conn.commit()

    @_guard
    def get_job(self, url_key: str) -> CrawlJob | None:
        row = self._conn.execute(
            "SELECT url_key, target_url, remaining_visits, interval_seconds, "
            "agent_profile, next_due, state, failures FROM jobs WHERE url_key = ?",
            (url_key,),
        ).fetchone()
        if row is None:
            return None
        return CrawlJob(
            url_key=row[0], target_url=row[1], remaining_visits=row[2],
            interval=timedelta(seconds=row[3]), agent_profile=row[4],
            next_due=datetime.fromisoformat(row[5]), state=row[6], failures=row[7],
        )

    # -- reports ----------------------------------------------------------

    @_guard
    def add_report(self, body: str, received_at: datetime) -> None:
        self._conn.execute(
            "INSERT INTO reports (received_at, body) VALUES (?, ?)",
            (received_at.isoformat(), body),
        )
        self._conn.commit()

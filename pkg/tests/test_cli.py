"""Command line interface: exit codes, output formats, server wiring."""

from __future__ import annotations

import json
import socket
import subprocess
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import httpx
import pytest
from click.testing import CliRunner

from cloakwatch.cli import main
from cloakwatch.features import PageDocument, fingerprint_page
from cloakwatch.simhash import to_hex
from cloakwatch.swm import Observation, build_model

NOW = datetime(2022, 5, 5, tzinfo=timezone.utc)

CLEAN_HTML = (
    "<html><head><title>x</title></head><body>"
    + "".join(f"<div class='r'><p>word{i} word{i + 1} word{i + 2}</p></div>" for i in range(40))
    + "</body></html>"
)
SCAM_HTML = (
    "<html><head><title>deals</title></head><body>"
    + "".join(f"<table border='1'><tr><td><font>scam{i} scam{i + 1}</font></td></tr></table>" for i in range(40))
    + "<form action='x'><input type='text'></form></body></html>"
)


@pytest.fixture()
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture()
def spider_model_path(tmp_path) -> Path:
    fp = fingerprint_page(PageDocument(CLEAN_HTML.encode()))
    model = build_model(
        "shop.test/",
        [Observation(fp.text_simhash, NOW, fp.text_count)] * 6,
        [Observation(fp.tag_simhash, NOW, fp.tag_count)] * 6,
        now=NOW,
    )
    path = tmp_path / "model.json"
    path.write_text(model.to_json(), encoding="utf-8")
    return path


@pytest.fixture()
def user_page_path(tmp_path) -> Path:
    path = tmp_path / "user.html"
    path.write_text(CLEAN_HTML, encoding="utf-8")
    return path


@pytest.fixture()
def scam_page_path(tmp_path) -> Path:
    path = tmp_path / "scam.html"
    path.write_text(SCAM_HTML, encoding="utf-8")
    return path


class TestFingerprint:
    def test_matches_library_output(self, runner, tmp_path, corpus_pages):
        name, page = next(iter(sorted(corpus_pages.items())))
        path = tmp_path / name
        path.write_bytes(page.raw_bytes)
        result = runner.invoke(main, ["fingerprint", str(path)])
        assert result.exit_code == 0
        fp = fingerprint_page(page)
        lines = result.stdout.splitlines()
        assert lines[0] == f"text {to_hex(fp.text_simhash)} {fp.text_count}"
        assert lines[1] == f"tag {to_hex(fp.tag_simhash)} {fp.tag_count}"

    def test_empty_file(self, runner, tmp_path):
        path = tmp_path / "empty.html"
        path.write_text("")
        result = runner.invoke(main, ["fingerprint", str(path)])
        assert result.exit_code == 0
        assert result.stdout.splitlines() == [
            "text 0000000000000000 0",
            "tag 0000000000000000 0",
        ]

    def test_missing_file_exits_2(self, runner, tmp_path):
        result = runner.invoke(main, ["fingerprint", str(tmp_path / "absent.html")])
        assert result.exit_code == 2


class TestDetectWithModelFile:
    def test_clean_page_exits_0(self, runner, spider_model_path, user_page_path):
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--model", str(spider_model_path)],
        )
        assert result.exit_code == 0, result.output
        verdict = json.loads(result.stdout)
        assert verdict["is_cloaking"] is False
        assert verdict["url_key"] == "shop.test/"

    def test_cloaked_page_exits_3(self, runner, spider_model_path, scam_page_path):
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(scam_page_path),
             "--model", str(spider_model_path)],
        )
        assert result.exit_code == 3
        assert json.loads(result.stdout)["is_cloaking"] is True

    def test_requires_exactly_one_source(self, runner, spider_model_path, user_page_path):
        result = runner.invoke(
            main, ["detect", "http://shop.test/", str(user_page_path)]
        )
        assert result.exit_code == 2
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--model", str(spider_model_path), "--server", "http://localhost:1"],
        )
        assert result.exit_code == 2

    def test_bad_model_file_exits_2(self, runner, tmp_path, user_page_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path), "--model", str(bad)],
        )
        assert result.exit_code == 2
        assert "bad model file" in result.stderr

    def test_params_override_changes_decision(
        self, runner, tmp_path, spider_model_path, scam_page_path
    ):
        params = tmp_path / "params.json"
        params.write_text(json.dumps({"r_text": 64.0, "r_tag": 64.0}))
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(scam_page_path),
             "--model", str(spider_model_path), "--params", str(params)],
        )
        assert result.exit_code == 0  # radii so wide nothing rejects


class TestDetectWithServer:
    def fake_get(self, monkeypatch, response: httpx.Response | Exception):
        seen = {}

        def get(url, params=None, timeout=None):
            seen["url"] = url
            seen["params"] = params
            if isinstance(response, Exception):
                raise response
            return response

        monkeypatch.setattr(httpx, "get", get)
        return seen

    def test_pending_exits_4(self, runner, monkeypatch, user_page_path):
        seen = self.fake_get(
            monkeypatch, httpx.Response(202, json={"status": "pending"})
        )
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--server", "http://localhost:8337/"],
        )
        assert result.exit_code == 4
        assert "model pending" in result.stderr
        assert seen["url"] == "http://localhost:8337/v1/swm"
        assert seen["params"] == {"url": "http://shop.test/"}

    def test_blacklisted_exits_3(self, runner, monkeypatch, user_page_path):
        self.fake_get(monkeypatch, httpx.Response(200, json={"listed": "black"}))
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--server", "http://localhost:8337"],
        )
        assert result.exit_code == 3
        assert json.loads(result.stdout) == {"listed": "black"}

    def test_whitelisted_exits_0(self, runner, monkeypatch, user_page_path):
        self.fake_get(monkeypatch, httpx.Response(200, json={"listed": "white"}))
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--server", "http://localhost:8337"],
        )
        assert result.exit_code == 0

    def test_served_model_is_used(
        self, runner, monkeypatch, spider_model_path, scam_page_path
    ):
        body = json.loads(spider_model_path.read_text())
        self.fake_get(monkeypatch, httpx.Response(200, json=body))
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(scam_page_path),
             "--server", "http://localhost:8337"],
        )
        assert result.exit_code == 3

    def test_unreachable_server_exits_2(self, runner, monkeypatch, user_page_path):
        self.fake_get(monkeypatch, httpx.ConnectError("refused"))
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--server", "http://localhost:1"],
        )
        assert result.exit_code == 2
        assert "unreachable" in result.stderr

    def test_malformed_model_exits_2(self, runner, monkeypatch, user_page_path):
        self.fake_get(monkeypatch, httpx.Response(200, json={"surprise": True}))
        result = runner.invoke(
            main,
            ["detect", "http://shop.test/", str(user_page_path),
             "--server", "http://localhost:8337"],
        )
        assert result.exit_code == 2
        assert "malformed model" in result.stderr


class TestEval:
    ARGS = ["eval", "--n-sites", "20", "--churn", "0.1",
            "--cloak-fraction", "0.25", "--seed", "3"]

    def test_prints_table_and_writes_csv(self, runner, tmp_path):
        out = tmp_path / "roc.csv"
        result = runner.invoke(main, self.ARGS + ["--out", str(out)])
        assert result.exit_code == 0, result.output
        assert "operating point at default radii" in result.stdout
        csv_lines = out.read_text().strip().splitlines()
        assert csv_lines[0] == "mode,r,tpr,fpr"
        assert len(csv_lines) > 1

    def test_deterministic(self, runner):
        first = runner.invoke(main, self.ARGS)
        second = runner.invoke(main, self.ARGS)
        assert first.stdout == second.stdout

    def test_na_for_zero_positives(self, runner):
        result = runner.invoke(
            main, ["eval", "--n-sites", "10", "--cloak-fraction", "0", "--seed", "3"]
        )
        assert result.exit_code == 0
        assert "TPR=n/a" in result.stdout

    def test_bad_fraction_exits_2(self, runner):
        result = runner.invoke(main, ["eval", "--cloak-fraction", "1.5"])
        assert result.exit_code == 2

    def test_bad_params_file_exits_2(self, runner, tmp_path):
        params = tmp_path / "params.json"
        params.write_text("{broken")
        result = runner.invoke(main, self.ARGS + ["--params", str(params)])
        assert result.exit_code == 2
        assert "bad params file" in result.stderr


def free_port() -> int:
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        return probe.getsockname()[1]


class TestServe:
    def test_malformed_config_exits_2(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text("not json at all")
        result = runner.invoke(main, ["serve", str(config)])
        assert result.exit_code == 2
        assert "bad config" in result.stderr

    def test_unknown_config_key_exits_2(self, runner, tmp_path):
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"portt": 1}))
        result = runner.invoke(main, ["serve", str(config)])
        assert result.exit_code == 2

    def test_port_in_use_exits_2(self, runner, tmp_path):
        holder = socket.socket()
        holder.bind(("127.0.0.1", 0))
        port = holder.getsockname()[1]
        try:
            config = tmp_path / "config.json"
            config.write_text(
                json.dumps({"listen": f"127.0.0.1:{port}",
                            "db_path": str(tmp_path / "db.sqlite")})
            )
            result = runner.invoke(main, ["serve", str(config)])
            assert result.exit_code == 2
            assert "cannot listen" in result.stderr
        finally:
            holder.close()

    def test_serves_health_endpoint(self, tmp_path):
        port = free_port()
        config = tmp_path / "config.json"
        config.write_text(
            json.dumps({
                "listen": f"127.0.0.1:{port}",
                "db_path": str(tmp_path / "db.sqlite"),
                "poll_interval_seconds": 0.1,
            })
        )
        proc = subprocess.Popen(
            [sys.executable, "-m", "cloakwatch.cli", "serve", str(config)],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            deadline = time.monotonic() + 15
            last_error = None
            while time.monotonic() < deadline:
                try:
                    response = httpx.get(f"http://127.0.0.1:{port}/v1/health", timeout=1.0)
                    assert response.json() == {"status": "ok"}
                    params = httpx.get(f"http://127.0.0.1:{port}/v1/params", timeout=1.0)
                    assert params.json()["r_text"] == 15.0
                    return
                except httpx.HTTPError as exc:
                    last_error = exc
                    time.sleep(0.2)
            pytest.fail(f"server never came up: {last_error}")
        finally:
            proc.terminate()
            proc.wait(timeout=10)

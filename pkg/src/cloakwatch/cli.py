"""Operator command line: fingerprint, detect, eval, serve.

Exit codes are a stable contract: 0 clean, 2 usage or IO error,
3 cloaking detected, 4 model still pending.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from .detector import DetectionParams, detect
from .errors import CloakwatchError
from .evalcorpus import EvalCorpusSpec, evaluate_corpus, render_report
from .features import PageDocument, fingerprint_page
from .simhash import to_hex
from .swm import WebsiteModel

EXIT_CLEAN = 0
EXIT_USAGE = 2
EXIT_CLOAKING = 3
EXIT_PENDING = 4


@click.group()
def main() -> None:
    """Cloaking detection toolkit."""


def _fail(message: str, code: int = EXIT_USAGE) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_params(params_path: str | None) -> DetectionParams:
    if params_path is None:
        return DetectionParams()
    try:
        data = json.loads(Path(params_path).read_text(encoding="utf-8"))
        return DetectionParams.from_dict(data)
    except (OSError, ValueError, TypeError) as exc:
        _fail(f"bad params file: {exc}")


@main.command()
@click.argument("html_path", type=click.Path(exists=True, dir_okay=False))
def fingerprint(html_path: str) -> None:
    """Print both channel fingerprints of an HTML file."""
    try:
        raw = Path(html_path).read_bytes()
    except OSError as exc:
        _fail(str(exc))
    fp = fingerprint_page(PageDocument(raw))
    click.echo(f"text {to_hex(fp.text_simhash)} {fp.text_count}")
    click.echo(f"tag {to_hex(fp.tag_simhash)} {fp.tag_count}")


@main.command("detect")
@click.argument("url")
@click.argument("user_html", type=click.Path(exists=True, dir_okay=False))
@click.option("--server", "server_addr", help="base address of a model server")
@click.option("--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              help="load the model from a JSON file instead")
@click.option("--params", "params_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON file overriding detection parameters")
def detect_cmd(url: str, user_html: str, server_addr: str | None,
               model_path: str | None, params_path: str | None) -> None:
    """Test a locally saved user view of URL against its model."""
    if (server_addr is None) == (model_path is None):
        raise click.UsageError("exactly one of --server or --model is required")
    params = _load_params(params_path)
    if model_path is not None:
        try:
            model = WebsiteModel.from_json(Path(model_path).read_text(encoding="utf-8"))
        except (OSError, ValueError, KeyError) as exc:
            _fail(f"bad model file: {exc}")
    else:
        model = _fetch_model(server_addr, url)
    try:
        raw = Path(user_html).read_bytes()
        verdict = detect(PageDocument(raw, final_url=url), model, params)
    except (OSError, CloakwatchError) as exc:
        _fail(str(exc))
    click.echo(verdict.to_json())
    sys.exit(EXIT_CLOAKING if verdict.is_cloaking else EXIT_CLEAN)


def _fetch_model(server_addr: str, url: str) -> WebsiteModel:
    import httpx

    try:
        response = httpx.get(
            server_addr.rstrip("/") + "/v1/swm", params={"url": url}, timeout=30.0
        )
    except httpx.HTTPError as exc:
        _fail(f"server unreachable: {exc}")
    if response.status_code == 202:
        click.echo("model pending", err=True)
        sys.exit(EXIT_PENDING)
    if response.status_code != 200:
        _fail(f"server answered {response.status_code}: {response.text}")
    body = response.json()
    if "listed" in body:
        click.echo(json.dumps(body))
        # a blacklisted URL is a known cloaker; a whitelisted one is clean
        sys.exit(EXIT_CLOAKING if body["listed"] == "black" else EXIT_CLEAN)
    try:
        return WebsiteModel.from_dict(body)
    except (ValueError, KeyError) as exc:
        _fail(f"malformed model from server: {exc}")


@main.command("eval")
@click.option("--n-sites", default=400, show_default=True)
@click.option("--churn", default=0.1, show_default=True)
@click.option("--cloak-fraction", default=0.25, show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--params", "params_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", "out_path", type=click.Path(dir_okay=False),
              help="also write the ROC sweep as CSV to this path")
def eval_cmd(n_sites: int, churn: float, cloak_fraction: float, seed: int,
             params_path: str | None, out_path: str | None) -> None:
    """Run detection over a synthetic corpus and print TPR/FPR tables."""
    params = _load_params(params_path)
    try:
        spec = EvalCorpusSpec(n_sites=n_sites, churn=churn,
                              cloak_fraction=cloak_fraction, seed=seed)
    except ValueError as exc:
        _fail(str(exc))
    outcomes = evaluate_corpus(spec, params)
    table, csv_text = render_report(spec, params, outcomes)
    click.echo(table, nl=False)
    if out_path is not None:
        try:
            Path(out_path).write_text(csv_text, encoding="utf-8")
        except OSError as exc:
            _fail(str(exc))


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def serve(config_path: str) -> None:
    """Serve the model API until interrupted."""
    import uvicorn

    from .server.app import build_app
    from .server.config import ServerConfig
    from .server.service import CrawlService
    from .server.store import Store

    try:
        config = ServerConfig.from_file(config_path)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        _fail(f"bad config: {exc}")
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((config.host, config.port))
    except OSError as exc:
        _fail(f"cannot listen on {config.listen}: {exc}")
    finally:
        probe.close()
    service = CrawlService(Store(config.db_path), config)
    app = build_app(service, run_scheduler=True)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")


if __name__ == "__main__":
    main()

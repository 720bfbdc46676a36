"""Operator command lines: gateway/sandbox servers, seeding, lint, export,
and the conformance harness."""

from __future__ import annotations

import json
import sys
import threading
from datetime import date
from pathlib import Path

import click
import httpx
import uvicorn

from .clock import Clock
from .errors import ServiceError
from .gateway import GatewayConfig, create_gateway_app, load_config
from .harness import (
    SUITES,
    DEFAULT_REFERENCE_DATE,
    HarnessEnvironment,
    generate_longitudinal_dataset,
    load_dataset,
    run_suite,
    write_dataset,
)
from .hi_service import HiClient, HiRegistry, create_hi_app
from .pcehr_service import PcehrClient, PcehrRepository, create_pcehr_app
from .rendering import lint_conformance, rendered_document_from_dict
from .records import DocumentView
from .timeline import timeline_from_dict


def _load_gateway_config(path: str | None) -> GatewayConfig:
    if path is None:
        return GatewayConfig()
    return load_config(path)


@click.group()
def main():
    """Timeline application gateway and operator tools."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8300, show_default=True)
def serve(config_path, host, port):
    """Run the gateway API server."""
    try:
        config = _load_gateway_config(config_path)
        app = create_gateway_app(config)
    except ServiceError as exc:
        click.echo(f"startup failed: {exc.code}: {exc.message}", err=True)
        sys.exit(1)
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--hi-port", default=8101, show_default=True)
@click.option("--pcehr-port", default=8102, show_default=True)
@click.option("--hi-seed", type=click.Path(exists=True), default=None)
@click.option("--pcehr-seed", type=click.Path(exists=True), default=None)
@click.option("--clock", "clock_date", default=None, help="Freeze 'today' (YYYY-MM-DD).")
def sandbox(host, hi_port, pcehr_port, hi_seed, pcehr_seed, clock_date):
    """Run both sandbox services (identifier service and record repository)."""
    clock = Clock.fixed(clock_date) if clock_date else Clock()
    registry = HiRegistry()
    repository = PcehrRepository(clock=clock)
    if hi_seed:
        data = json.loads(Path(hi_seed).read_text())
        from .hi_service import HiRegistryEntry, ProviderEntry

        registry.seed(
            [HiRegistryEntry.from_dict(e) for e in data.get("entries", [])],
            [ProviderEntry.from_dict(p) for p in data.get("providers", [])],
        )
        click.echo(f"seeded identifier service from {hi_seed}")
    if pcehr_seed:
        data = json.loads(Path(pcehr_seed).read_text())
        from .pcehr_service import PcehrAccount

        repository.seed([PcehrAccount.from_dict(a) for a in data.get("accounts", [])])
        click.echo(f"seeded record repository from {pcehr_seed}")

    hi_server = uvicorn.Server(
        uvicorn.Config(create_hi_app(registry), host=host, port=hi_port, log_level="warning")
    )
    pcehr_server = uvicorn.Server(
        uvicorn.Config(
            create_pcehr_app(repository), host=host, port=pcehr_port, log_level="warning"
        )
    )
    thread = threading.Thread(target=hi_server.run, daemon=True)
    thread.start()
    click.echo(f"identifier service on http://{host}:{hi_port}")
    click.echo(f"record repository on http://{host}:{pcehr_port}")
    pcehr_server.run()


@main.command()
@click.option("--patients", default=20, show_default=True)
@click.option("--years", default=3, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(), default="seed-data", show_default=True)
@click.option("--push/--no-push", default=True, show_default=True,
              help="POST the seed files to the running sandboxes.")
def seed(patients, years, seed, config_path, out_dir, push):
    """Generate a longitudinal dataset and seed the sandboxes with it."""
    config = _load_gateway_config(config_path)
    reference = (
        date.fromisoformat(config.clock_override)
        if config.clock_override
        else DEFAULT_REFERENCE_DATE
    )
    bundle = generate_longitudinal_dataset(patients, years, seed, reference_date=reference)
    paths = write_dataset(bundle, out_dir)
    for path in paths:
        click.echo(f"wrote {path}")
    if push:
        try:
            hi = HiClient(httpx.Client(base_url=config.hi_base_url, timeout=10))
            pcehr = PcehrClient(httpx.Client(base_url=config.pcehr_base_url, timeout=10))
            hi.seed(bundle.hi_seed["entries"], bundle.hi_seed["providers"])
            pcehr.seed(bundle.pcehr_seed["accounts"])
        except (httpx.TransportError, ServiceError) as exc:
            click.echo(f"seeding failed: {exc}", err=True)
            sys.exit(1)
        click.echo("sandboxes seeded")
    org = bundle.organization
    click.echo(
        "activation credentials: "
        f"hpi_o={org['hpi_o']} certificate_token={org['certificate_token']}"
    )


@main.command()
@click.argument("view_file", type=click.Path(exists=True))
@click.argument("rendering_file", type=click.Path(exists=True))
def lint(view_file, rendering_file):
    """Lint a rendering file against its source view; exit 0 on PASS."""
    try:
        view = DocumentView.from_dict(json.loads(Path(view_file).read_text()))
        payload = json.loads(Path(rendering_file).read_text())
        if "rendering" in payload:
            payload = payload["rendering"]
        elif "timeline" in payload:
            payload = payload["timeline"]
        if "rows" in payload:
            rendered = rendered_document_from_dict(payload)
        elif "events" in payload:
            rendered = timeline_from_dict(payload)
        else:
            raise ServiceError(
                "MALFORMED_RENDERING", "payload is neither a rendering nor a timeline"
            )
        report = lint_conformance(rendered, view)
    except (ServiceError, json.JSONDecodeError) as exc:
        click.echo(f"lint failed: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps(report.to_dict(), indent=2))
    sys.exit(0 if report.verdict == "PASS" else 1)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_file", type=click.Path(), required=True)
def export(config_path, out_file):
    """Download the de-identified research dataset from the gateway."""
    config = _load_gateway_config(config_path)
    try:
        response = httpx.get(
            f"{config.gateway_base_url}/api/admin/export",
            headers={"X-Admin-Token": config.admin_token},
            timeout=30,
        )
    except httpx.TransportError as exc:
        click.echo(f"export failed: {exc}", err=True)
        sys.exit(1)
    if response.status_code != 200:
        click.echo(f"export failed: {response.status_code} {response.text}", err=True)
        sys.exit(1)
    Path(out_file).write_text(response.text)
    click.echo(f"wrote {out_file}")


@click.group()
def harness_main():
    """Connection and conformance test suites."""


@harness_main.command("gen")
@click.option("--patients", default=20, show_default=True)
@click.option("--years", default=3, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", "out_dir", type=click.Path(), required=True)
@click.option("--reference-date", default=None, help="Anchor date (YYYY-MM-DD).")
def harness_gen(patients, years, seed, out_dir, reference_date):
    """Generate longitudinal seed files for both sandboxes."""
    reference = (
        date.fromisoformat(reference_date) if reference_date else DEFAULT_REFERENCE_DATE
    )
    bundle = generate_longitudinal_dataset(patients, years, seed, reference_date=reference)
    for path in write_dataset(bundle, out_dir):
        click.echo(f"wrote {path}")


@harness_main.command("run")
@click.argument("suite", type=click.Choice(SUITES))
@click.option("--env", "config_path", type=click.Path(exists=True), required=True)
@click.option("--dataset", "dataset_dir", type=click.Path(exists=True), default=None,
              help="Dataset directory; defaults to the config's dataset_dir.")
@click.option("--transcript", type=click.Path(), default=None)
@click.option("--seed-sandboxes/--no-seed-sandboxes", default=False, show_default=True)
def harness_run(suite, config_path, dataset_dir, transcript, seed_sandboxes):
    """Replay one suite against a running environment."""
    config = load_config(config_path)
    directory = dataset_dir or config.dataset_dir
    if not directory:
        click.echo("no dataset: pass --dataset or set dataset_dir in the config", err=True)
        sys.exit(2)
    bundle = load_dataset(directory)
    env = HarnessEnvironment(
        gateway_http=httpx.Client(base_url=config.gateway_base_url, timeout=30),
        hi=HiClient(httpx.Client(base_url=config.hi_base_url, timeout=10)),
        pcehr=PcehrClient(httpx.Client(base_url=config.pcehr_base_url, timeout=10)),
        bundle=bundle,
        admin_token=config.admin_token,
    )
    try:
        if seed_sandboxes:
            env.seed_sandboxes()
        report = run_suite(suite, env, transcript_path=transcript)
    except ServiceError as exc:
        click.echo(f"suite aborted: {exc.code}: {exc.message}", err=True)
        sys.exit(2)
    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"[{status}] {result.scenario_id} step {result.step_index}: {result.action}")
    click.echo(f"{suite}: {report.pass_count} passed, {report.fail_count} failed")
    if transcript:
        click.echo(f"transcript: {transcript}")
    sys.exit(0 if report.passed else 1)

"""Command-line entry point: compile -> run -> merge -> serve."""

from __future__ import annotations

import sys

import click

from . import enumerator, parser, runner, synthesizer
from .errors import EmptyMultiverseError, RunError, SpecError

_CONFIG_KEYS = {
    "language": "script_language",
    "dataset": "dataset_file",
    "shuffle_column": "shuffle_column",
    "sensitivity": "sensitivity_method",
    "before_execute": "before_execute",
    "after_execute": "after_execute",
    "output_dir": "output_dir",
}


def _fail(category: str, detail: str) -> "click.exceptions.Exit":
    click.echo(f"error: {category}: {detail}", err=True)
    sys.exit(1)


def _apply_overrides(config, overrides: tuple[str, ...]):
    for item in overrides:
        if "=" not in item:
            _fail("cli", f"--config expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        if key not in _CONFIG_KEYS:
            _fail("cli", f"unknown config key {key!r} (known: {sorted(_CONFIG_KEYS)})")
        setattr(config, _CONFIG_KEYS[key], value)
    if config.sensitivity_method not in ("ks", "f"):
        _fail("config", "sensitivity must be 'ks' or 'f'")


@click.group()
def main():
    """Compile an annotated analysis script into its multiverse, execute the
    variants in parallel, merge their outputs, and explore them locally."""


@main.command("compile")
@click.argument("spec_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--force", is_flag=True, help="overwrite a non-empty output directory")
@click.option("--config", "overrides", multiple=True, metavar="KEY=VALUE",
              help="override a config value from the command line")
def compile_cmd(spec_file: str, out_dir: str, force: bool, overrides):
    """Parse SPEC_FILE, enumerate its universes and write them to OUT_DIR."""
    try:
        with open(spec_file, encoding="utf-8") as f:
            source = f.read()
        spec = parser.parse_spec(source, spec_file)
        _apply_overrides(spec.config, overrides)
        universes = enumerator.enumerate(spec)
        for warning in getattr(spec, "warnings", []):
            click.echo(f"warning: {warning}", err=True)
        for warning in enumerator.constraint_warnings(spec, universes):
            click.echo(f"warning: {warning}", err=True)
        synthesizer.write_universes(spec, universes, out_dir, force=force)
    except SpecError as e:
        _fail("spec", str(e))
    except EmptyMultiverseError as e:
        _fail("enumerate", str(e))
    except RunError as e:
        _fail("compile", str(e))
    click.echo(f"{len(universes)} universes")


@main.command("run")
@click.argument("out_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--jobs", type=int, default=None, help="parallel processes (default: CPUs)")
@click.option("--timeout", type=float, default=None, help="per-universe timeout (seconds)")
@click.option("--null", "null_n", type=int, default=None,
              help="permutation mode: run N shuffled copies of the dataset")
@click.option("--seed", type=int, default=None, help="RNG seed for null shuffles")
@click.option("--no-merge", is_flag=True, help="skip the automatic merge step")
@click.option("--skip-existing", is_flag=True,
              help="skip universes whose output file already exists")
def run_cmd(out_dir, jobs, timeout, null_n, seed, no_merge, skip_existing):
    """Execute every universe script in OUT_DIR."""
    try:
        manifest = synthesizer.load_manifest(out_dir)
        if null_n is not None:
            if not manifest.dataset_file or not manifest.shuffle_column:
                _fail("run", "null mode needs 'dataset' and 'shuffle_column' in the config")
            path = runner.run_null(
                manifest, manifest.dataset_file, manifest.shuffle_column,
                null_n, seed=seed, parallelism=jobs, timeout=timeout,
            )
            click.echo(f"null estimates written to {path}")
            return
        report = runner.run(
            manifest, parallelism=jobs, timeout=timeout, skip_existing=skip_existing
        )
        click.echo(
            f"attempted {report.attempted}, succeeded {report.succeeded}, "
            f"failed {report.failed} in {report.wall_time:.1f}s"
        )
        if not no_merge:
            runner.merge(out_dir)
            click.echo("merged results.csv")
    except RunError as e:
        _fail("run", str(e))


@main.command("merge")
@click.argument("out_dir", type=click.Path(exists=True, file_okay=False))
def merge_cmd(out_dir):
    """Merge per-universe outputs in OUT_DIR into results.csv."""
    try:
        path = runner.merge(out_dir)
    except RunError as e:
        _fail("merge", str(e))
    click.echo(f"wrote {path}")


@main.command("serve")
@click.argument("out_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--port", type=int, default=8080, show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(file_okay=False), default=None,
              help="directory of built UI assets to serve at /")
def serve_cmd(out_dir, port, ui_dir):
    """Serve the explorer API (and optional UI) for OUT_DIR."""
    from .server import serve

    try:
        serve(out_dir, port=port, ui_dir=ui_dir)
    except RunError as e:
        _fail("serve", str(e))


if __name__ == "__main__":
    main()

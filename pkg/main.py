"""Command-line interface for the biflock two-ensemble flocking simulator."""

import sys
from typing import Any, Dict, Optional

import click
from loguru import logger

from src import __version__
from src.core import certificate_registry, engine
from src.core.errors import ConfigError
from src.experiments.presets import PRESETS, preset, preset_names
from src.experiments.run_config import RunConfig
from src.experiments.runner import EXIT_CONFIG, run, sweep
from src.flows import *  # noqa: F401,F403 - registers the pipeline stages
from src.utils.config import settings
from src.utils.config_file import load_config_file, nest


def configure_logging(level: str):
    logger.remove()
    logger.add(sys.stderr, level=level)
    logger.add(str(settings.log_dir / "biflock_{time}.log"), rotation="1 day", level="DEBUG")


def build_config(config_path: Optional[str], preset_name: Optional[str], overrides: Dict[str, Any]) -> RunConfig:
    """Preset, then config file, then flag overrides."""
    entries = load_config_file(config_path) if config_path else {}
    file_preset = entries.pop("preset", None)
    preset_name = preset_name or file_preset
    if preset_name:
        config = preset(preset_name).with_overrides(entries)
    else:
        config = RunConfig.from_mapping(nest(entries))
    return config.with_overrides({k: v for k, v in overrides.items() if v is not None})


def run_options(func):
    """Options shared by run and sweep."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), help="Key-value config file"),
        click.option("--preset", "preset_name", help="Named preset (see 'presets')"),
        click.option("--seed", type=int, help="64-bit seed for random initial data"),
        click.option("--out-dir", help="Directory for CSV/JSON artifacts"),
        click.option("--dt", type=float, help="RK4 step size"),
        click.option("--t-end", type=float, help="Final time"),
        click.option("--dump-states", is_flag=True, default=None, help="Also write every sampled state"),
        click.option("--certificates", help="Comma-separated certificate names"),
        click.option("--strict", is_flag=True, help="Exit 4 when a certificate is violated"),
        click.option("--eps-v", type=float, default=None, help="Velocity separation threshold"),
        click.option("--eps-x", type=float, default=None, help="Spatial separation threshold"),
        click.option("--eps-f", type=float, default=None, help="Flocking threshold on the fluctuation energy"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _overrides(seed, out_dir, dt, t_end, dump_states, certificates) -> Dict[str, Any]:
    return {
        "seed": seed,
        "outputs.dir": out_dir,
        "sim.dt": dt,
        "sim.t_end": t_end,
        "outputs.dump_states": dump_states,
        "certificates": certificates,
    }


def _thresholds(eps_v, eps_x, eps_f):
    defaults = settings.stage_thresholds
    return tuple(d if v is None else v for v, d in zip((eps_v, eps_x, eps_f), defaults))


@click.group()
@click.version_option(__version__)
@click.option("--log-level", default=None, help="Console log level (defaults to BIFLOCK_LOG_LEVEL)")
def cli(log_level):
    """biflock - two-ensemble Cucker-Smale simulator with theory checks."""
    configure_logging(log_level or settings.log_level)


@cli.command("run")
@run_options
@click.pass_context
def run_command(ctx, config_path, preset_name, seed, out_dir, dt, t_end, dump_states, certificates, strict, eps_v, eps_x, eps_f):
    """Simulate one configuration and write its artifacts."""
    try:
        config = build_config(config_path, preset_name, _overrides(seed, out_dir, dt, t_end, dump_states, certificates))
    except ConfigError as e:
        click.echo(f"❌ Configuration error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)

    click.echo(f"🚀 Running {config.name} (n1={config.model.n1}, n2={config.model.n2}, t_end={config.sim.t_end})")
    outcome = run(config, strict=strict, thresholds=_thresholds(eps_v, eps_x, eps_f))

    if outcome.summary:
        for cert in outcome.summary["certificates"]:
            mark = {"Holds": "✅", "Violated": "❌"}.get(cert["status"], "➖")
            click.echo(f"  {mark} {cert['name']}: {cert['status']} (margin {cert['margin']})")
    for path in outcome.artifacts:
        click.echo(f"📁 {path}")
    if outcome.error:
        click.echo(f"⚠️  {outcome.error}", err=True)
    click.echo(f"Exit status: {outcome.status}")
    ctx.exit(outcome.exit_code)


@cli.command("sweep")
@run_options
@click.option("--axis", required=True, help="Dotted numeric config field, e.g. model.kappa_s")
@click.option("--values", "values_text", required=True, help="Comma-separated values")
@click.option("--parallelism", type=int, default=None, help="Concurrent runs (defaults to BIFLOCK_SWEEP_PARALLELISM)")
@click.pass_context
def sweep_command(
    ctx, config_path, preset_name, seed, out_dir, dt, t_end, dump_states, certificates, strict,
    eps_v, eps_x, eps_f, axis, values_text, parallelism,
):
    """Run one configuration per value of AXIS and aggregate the results."""
    try:
        config = build_config(config_path, preset_name, _overrides(seed, out_dir, dt, t_end, dump_states, certificates))
        values = [float(v) for v in values_text.split(",") if v.strip()]
        result = sweep(
            config,
            axis,
            values,
            parallelism=parallelism or settings.sweep_parallelism,
            out_dir=out_dir,
            strict=strict,
            thresholds=_thresholds(eps_v, eps_x, eps_f),
        )
    except (ConfigError, ValueError) as e:
        click.echo(f"❌ Configuration error: {e}", err=True)
        ctx.exit(EXIT_CONFIG)

    click.echo(f"📈 Sweep over {axis}:")
    for row in result.rows:
        click.echo(f"  {axis}={row['value']}: {row['status']}")
    click.echo(f"📁 {result.aggregate_path}")


@cli.command("presets")
def presets_command():
    """List the preset catalog."""
    for name in preset_names():
        config = PRESETS[name]()
        m = config.model
        click.echo(
            f"{name:32s} n={m.n1}+{m.n2} dim={m.dim} kappa_s={m.kappa_s} kappa_d={m.kappa_d} "
            f"delta={m.delta} t_end={config.sim.t_end}"
        )


@cli.command()
def status():
    """Show settings, pipeline stages and certificates."""
    click.echo("🔍 biflock status\n")
    click.echo(f"📦 Version: {__version__}")
    click.echo(f"⚙️  Pipeline stages: {', '.join(engine.get_status()['available_flows'])}")
    click.echo(f"📜 Certificates: {', '.join(certificate_registry.names())}")
    click.echo(f"🎚️  Thresholds: eps_v={settings.eps_v} eps_x={settings.eps_x} eps_f={settings.eps_f}")
    click.echo(f"📏 Tolerances: envelope={settings.envelope_tol} macro={settings.macro_tol}")
    click.echo(f"📁 Output Directory: {settings.output_dir}")


if __name__ == "__main__":
    cli()

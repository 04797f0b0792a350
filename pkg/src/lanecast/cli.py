"""Command-line entry points: loadgen, audiometer, bench, and the gateway server."""

from __future__ import annotations

import json
import sys
from dataclasses import asdict

import click

from .loadgen import LoadProfile, generate_workload, stress_profile_testcase1, workload_to_json


@click.command(name="loadgen")
@click.option("--duration", default=3600.0, show_default=True, help="Workload length in seconds.")
@click.option("--rate", default=12.0, show_default=True, help="Danmaku arrivals per second.")
@click.option("--gift-peak", default=50, show_default=True, help="Gift events per storm.")
@click.option("--storm-period", default=600.0, show_default=True, help="Seconds between storm windows.")
@click.option("--storm-probability", default=0.15, show_default=True)
@click.option("--seed", default=42, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output path (stdout when omitted).")
def loadgen(duration, rate, gift_peak, storm_period, storm_probability, seed, out):
    """Generate a synthetic interaction workload as event JSON."""
    profile = LoadProfile(
        duration=duration,
        dmk_rate=rate,
        gift_peak=gift_peak,
        storm_period=storm_period,
        storm_probability=storm_probability,
        seed=seed,
    )
    try:
        events = generate_workload(profile)
    except ValueError as exc:
        raise click.ClickException(str(exc))
    text = workload_to_json(profile, events)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {len(events)} events to {out}")
    else:
        click.echo(text)


@click.group(name="audiometer")
def audiometer():
    """Loudness and true-peak measurement."""


@audiometer.command(name="report")
@click.argument("wav_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--sum-channels", is_flag=True, help="Sum channel energies instead of averaging (dual-mono reads 3 LU higher).")
def audiometer_report(wav_path, sum_channels):
    """Print the loudness report for a 16-bit WAV file as JSON."""
    from .audio.loudness import BS1770_SUM_WEIGHTS, integrated_loudness
    from .audio.pcm import read_wav

    buf = read_wav(wav_path)
    weights = BS1770_SUM_WEIGHTS[: buf.channels] if sum_channels else None
    report = integrated_loudness(buf, channel_weights=weights)
    click.echo(json.dumps(report.to_json_dict(), indent=2))


@click.group(name="bench")
def bench():
    """Replay benchmarks and kernel timings."""


@bench.command(name="run")
@click.option("--profile", "profile_name", default="testcase1", show_default=True,
              type=click.Choice(["testcase1", "default", "soak"]))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), default=None)
@click.option("--duration", default=None, type=float, help="Override profile duration (seconds).")
@click.option("--seed", default=42, show_default=True)
@click.option("--no-launch-rule", is_flag=True, help="Ablation: naive round-robin lane assignment.")
def bench_run(profile_name, report_path, duration, seed, no_launch_rule):
    """Replay a workload through the engine and print/write the run report."""
    from .bench import process_rss_bytes, replay_workload, run_soak
    from .engine import EngineConfig
    from .metrics import emit_report

    if profile_name == "soak":
        soak_seconds = duration or 600.0
        report, _, rss = run_soak(soak_seconds, rss_sampler=process_rss_bytes)
        report.config_echo["rss_bytes"] = rss
    else:
        if profile_name == "testcase1":
            profile = stress_profile_testcase1()
        else:
            profile = LoadProfile(seed=seed)
        if duration is not None:
            profile = LoadProfile(**{**asdict(profile), "duration": duration})
        config = EngineConfig(launch_rule=not no_launch_rule)
        report, _ = replay_workload(profile, config)
    payload = report.to_dict()
    if report_path:
        emit_report(report, report_path)
        click.echo(f"report written to {report_path}")
    summary = {
        "overlap_rate": payload["overlap_rate"],
        "duplicate_rate": payload["duplicate_rate"],
        "drop_count": payload["drop_count"],
        "delivered": payload["delivered"],
        "wall_seconds": round(payload["wall_seconds"], 3),
    }
    click.echo(json.dumps(summary if report_path else payload, indent=2))


@bench.command(name="kernels")
@click.option("--seconds", default=10.0, show_default=True, help="Test-signal length.")
def bench_kernels_cmd(seconds):
    """Compare the compiled kernel backend against the NumPy fallback."""
    from . import kernels
    from .bench import bench_kernels

    rows = bench_kernels(seconds=seconds)
    click.echo(f"active backend: {kernels.BACKEND}")
    for row in rows:
        parts = [f"{row['kernel']:>18}"]
        for key in ("numpy_ms", "cython_ms"):
            if key in row:
                parts.append(f"{key.split('_')[0]}={row[key]:8.3f} ms")
        if "speedup_numpy_over" in row:
            parts.append(f"speedup x{row['speedup_numpy_over']:.1f}")
        click.echo("  ".join(parts))
    if "cython" not in kernels.backends():
        click.echo("compiled backend unavailable; showing fallback only", err=True)


@click.group(name="main")
def main():
    """Engine utilities and the operator gateway."""


@main.command(name="serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8140, show_default=True)
def serve(host, port):
    """Run the operator gateway (HTTP control + WebSocket stream)."""
    import uvicorn

    from .gateway import create_app

    uvicorn.run(create_app(), host=host, port=port, log_level="info")


main.add_command(loadgen)
main.add_command(audiometer)
main.add_command(bench)


if __name__ == "__main__":
    sys.exit(main())

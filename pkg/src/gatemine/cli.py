"""Command-line front end wiring the whole pipeline.

Five subcommands cover the stages end to end: ``synth`` builds deterministic
synthetic recordings, ``mine`` turns recordings into function distributions
and state graphs, ``minimize`` canonicalizes ids or expressions, ``simulate``
renders and measures automaton runs, and ``report`` joins mined counts with
measured complexity.

All randomness flows from explicit ``--seed`` values; given the same inputs
and seeds every command reproduces byte-identical outputs.  Values from a
``--config`` file override the corresponding command-line flags.  Exit codes:
0 on success, 1 for input errors, 2 for internal invariant violations.
"""

from __future__ import annotations

import csv
import json
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path

import click
import numpy as np

from . import ca, complexity, mining, recording, sop
from .recording import Schema, parse_config

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2


@dataclass
class PipelineConfig:
    """Bag of knobs shared by the subcommands, filled from flags then
    overridden by config-file entries."""

    thresholds: list[float] | None = None
    width: int = 500
    steps: int = 500
    p: float = 0.5
    seeds: list[int] = field(default_factory=list)
    out_dir: Path | None = None
    samples_per_state: int = 64
    schema: Schema = field(default_factory=Schema)

    def bands(self) -> list[recording.ThresholdBand]:
        if self.thresholds is None:
            return recording.threshold_sweep()
        values = list(self.thresholds)
        if any(v <= 0 for v in values) or values != sorted(values) or len(set(values)) != len(values):
            raise ValueError("thresholds must be positive and strictly ascending")
        return [recording.ThresholdBand(v) for v in values]


def _load_config(path: str | None) -> dict[str, str]:
    return parse_config(path) if path else {}


def _apply_config(cfg: dict[str, str], pc: PipelineConfig) -> PipelineConfig:
    if "thresholds" in cfg:
        pc.thresholds = [float(x) for x in cfg["thresholds"].split(",") if x.strip()]
    if "width" in cfg:
        pc.width = int(cfg["width"])
    if "steps" in cfg:
        pc.steps = int(cfg["steps"])
    if "p" in cfg:
        pc.p = float(cfg["p"])
    if "seeds" in cfg:
        pc.seeds = [int(x) for x in cfg["seeds"].split(",") if x.strip()]
    if "out_dir" in cfg:
        pc.out_dir = Path(cfg["out_dir"])
    if "samples_per_state" in cfg:
        pc.samples_per_state = int(cfg["samples_per_state"])
    pc.schema = Schema.from_mapping(cfg)
    return pc


@click.group()
def cli():
    """Mine Boolean functions from voltage recordings and rank them by
    cellular-automaton complexity."""


@cli.command()
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True,
              help="Output directory for recordings and the session config.")
@click.option("--repeats", default=1, show_default=True, help="Number of recordings.")
@click.option("--seed", default=0, show_default=True,
              help="Master seed; repeat r uses seed+r.")
@click.option("--samples-per-state", default=64, show_default=True)
@click.option("--peak-mv", default=100.0, show_default=True, help="Injected spike amplitude.")
@click.option("--noise-mv", default=0.0, show_default=True, help="Uniform noise amplitude.")
@click.option("--sync-mv", default=5000.0, show_default=True, help="Sync pulse amplitude.")
@click.option("--tables", default=None,
              help="Seven comma-separated table ids injected into every repeat "
                   "(default: random ids drawn from the seed).")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key = value file; entries override flags.")
def synth(out_dir, repeats, seed, samples_per_state, peak_mv, noise_mv, sync_mv,
          tables, config_path):
    """Generate deterministic synthetic recordings with known functions."""
    cfg = _load_config(config_path)
    pc = _apply_config(cfg, PipelineConfig(samples_per_state=samples_per_state))
    out_dir.mkdir(parents=True, exist_ok=True)
    injected: dict[str, list[int]] = {}
    for r in range(repeats):
        if tables is not None:
            ids = [int(x) for x in tables.split(",")]
        else:
            rng = np.random.default_rng(seed + r)
            ids = [int(v) for v in rng.integers(0, 0x10000, size=recording.N_CHANNELS)]
        rec = recording.synthesize_recording(
            ids,
            peak_amplitude_mv=peak_mv,
            noise_amplitude_mv=noise_mv,
            samples_per_state=pc.samples_per_state,
            seed=seed + r,
            sync_amplitude_mv=sync_mv,
        )
        path = out_dir / f"recording_{r:02d}.csv"
        recording.write_recording_csv(rec, path)
        injected[path.name] = ids
        click.echo(f"wrote {path}")
    (out_dir / "session.cfg").write_text(
        "units = mV\n"
        f"sync_amplitude_mv = {sync_mv}\n"
        f"samples_per_state = {pc.samples_per_state}\n",
        encoding="utf-8",
    )
    (out_dir / "injected_tables.json").write_text(
        json.dumps(injected, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    click.echo(f"wrote {out_dir / 'session.cfg'}")


@cli.command()
@click.argument("recordings", nargs=-1, required=True,
                type=click.Path(exists=True, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key = value schema/config file; entries override flags.")
@click.option("--top", default=16, show_default=True, help="Rows in the summary table.")
def mine(recordings, out_dir, config_path, top):
    """Mine recordings into a distribution, state graphs and a summary.

    Uses the standard 32-threshold sweep (20 mV to 175 mV in 5 mV steps)
    unless the config file overrides it.
    """
    cfg = _load_config(config_path)
    pc = _apply_config(cfg, PipelineConfig())
    bands = pc.bands()
    out_dir.mkdir(parents=True, exist_ok=True)
    graph_dir = out_dir / "graphs"
    graph_dir.mkdir(exist_ok=True)

    results = []
    failures = []
    for index, path in enumerate(recordings):
        try:
            rec = recording.load_recording(path, pc.schema)
            results.append(
                mining.mine(
                    rec,
                    bands,
                    repeat_index=index,
                    sync_threshold_mv=pc.schema.effective_sync_threshold_mv,
                    baseline=pc.schema.baseline,
                    min_width=pc.schema.min_peak_width,
                )
            )
        except (ValueError, OSError) as exc:
            failures.append(f"{path}: {exc}")

    n_graphs = 0
    for result in results:
        for t in range(result.n_thresholds):
            graph = mining.build_state_graph(result, t)
            name = f"repeat{result.repeat_index:02d}_threshold{t:02d}"
            mining.write_state_graph(graph, graph_dir / f"{name}.dot", name)
            n_graphs += 1

    dist = mining.tally(results)
    mining.write_distribution_csv(dist, out_dir / "distribution.csv")
    mining.write_histogram_csv(dist, out_dir / "histogram.csv")

    summary = [
        f"recordings mined: {len(results)} of {len(recordings)}",
        f"tables mined: {dist.total()}",
        f"state graphs: {n_graphs}",
        f"trivial tables (FALSE/TRUE): {dist.trivial_total()}",
        f"non-trivial tables: {dist.nontrivial_total()}",
        "",
        f"top {top} non-trivial functions:",
        mining.format_top_table(dist, top),
    ]
    if failures:
        summary.append("failures:")
        summary.extend(f"  {f}" for f in failures)
    (out_dir / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    click.echo("\n".join(summary))
    if failures:
        for failure in failures:
            click.echo(f"error: {failure}", err=True)
        sys.exit(EXIT_INPUT)


@cli.command()
@click.argument("source", type=click.File("r"), default="-")
def minimize(source):
    """Canonicalize ids or SOP expressions, one per input line.

    Integer lines are treated as table ids; anything else is parsed as an
    expression (LaTeX-style overlines are normalized away first).  Output is
    one canonical minimal SOP per input line, in input order.
    """
    lines = [line.strip() for line in source]
    outputs = []
    errors = []
    for lineno, line in enumerate(lines, start=1):
        if not line:
            continue
        try:
            if line.lstrip("-").isdigit():
                fid = int(line)
                if not 0 <= fid <= 0xFFFF:
                    raise ValueError(f"table id out of range: {fid}")
            else:
                fid = sop.to_truth_table(sop.parse_sop(sop.normalize_latex(line))).bits
            outputs.append(sop.canonical_sop(fid))
        except ValueError as exc:
            errors.append(f"line {lineno}: {exc}")
    if errors:
        for err in errors:
            click.echo(f"error: {err}", err=True)
        sys.exit(EXIT_INPUT)
    for text in outputs:
        click.echo(text)


@cli.command()
@click.option("--function", "spec_text", required=True,
              help="Table id or SOP expression to run.")
@click.option("--width", default=500, show_default=True)
@click.option("--steps", default=500, show_default=True)
@click.option("--p", default=0.5, show_default=True,
              help="Probability a cell starts in state 1.")
@click.option("--seed", "seeds", multiple=True, type=int, required=True,
              help="Seed for the initial row; repeat for several runs.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--pgm", "write_pgm", is_flag=True, help="Also write raw PGM renders.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="key = value file; entries override flags.")
def simulate(spec_text, width, steps, p, seeds, out_dir, write_pgm, config_path):
    """Evolve an automaton and write images plus a complexity report per seed."""
    cfg = _load_config(config_path)
    pc = _apply_config(cfg, PipelineConfig(width=width, steps=steps, p=p, seeds=list(seeds)))
    if not pc.seeds:
        raise click.UsageError("at least one --seed is required")
    if spec_text.strip().lstrip("-").isdigit():
        fid = int(spec_text)
        if not 0 <= fid <= 0xFFFF:
            raise ValueError(f"table id out of range: {fid}")
    else:
        fid = sop.to_truth_table(sop.parse_sop(sop.normalize_latex(spec_text))).bits
    rule = ca.rule_from_function(mining.table_from_id(fid))
    out_dir.mkdir(parents=True, exist_ok=True)
    for seed in pc.seeds:
        init = ca.random_config(pc.width, pc.p, seed)
        st = ca.evolve(init, rule, pc.steps)
        report = complexity.analyze(fid, st)
        stem = f"f{fid}_s{seed}"
        (out_dir / f"{stem}.png").write_bytes(complexity.render_png(st))
        if write_pgm:
            (out_dir / f"{stem}.pgm").write_bytes(st.to_pgm())
        complexity.write_report_json(report, out_dir / f"{stem}.json")
        click.echo(
            f"{stem}: class {report.wolfram_class}, "
            f"{report.lz76_factors} factors, {report.png_bytes} png bytes, "
            f"attractor {report.attractor.kind}"
        )


@cli.command()
@click.option("--distribution", "dist_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="distribution.csv produced by `mine` (id,count,...).")
@click.option("--complexity", "complexity_paths", multiple=True, required=True,
              type=click.Path(exists=True, path_type=Path),
              help="Complexity JSON files or directories of them.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--exclude", default="", help="Comma-separated function ids to drop "
              "from the scatter output.")
def report(dist_path, complexity_paths, out_dir, exclude):
    """Join mined counts with measured complexity into plot-ready tables."""
    counts: dict[int, int] = {}
    with dist_path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "id" not in reader.fieldnames or "count" not in reader.fieldnames:
            raise ValueError(f"{dist_path}: expected 'id' and 'count' columns")
        for row in reader:
            counts[int(row["id"])] = int(row["count"])

    json_paths: list[Path] = []
    for path in complexity_paths:
        if path.is_dir():
            json_paths.extend(sorted(path.glob("*.json")))
        else:
            json_paths.append(path)
    reports: dict[int, dict] = {}
    for path in json_paths:
        data = complexity.read_report_json(path)
        reports[int(data["function_id"])] = data
    if not reports:
        raise ValueError("nothing to join: no complexity reports found")

    excluded = {int(x) for x in exclude.split(",") if x.strip()}
    joined = sorted(set(counts) & set(reports))
    mismatched_counts = sorted(set(counts) - set(reports))
    mismatched_reports = sorted(set(reports) - set(counts))
    if not joined:
        raise ValueError("nothing to join: no common function ids")

    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "counts_histogram.csv").open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "count"])
        for fid in sorted(counts):
            writer.writerow([fid, counts[fid]])

    scatter_rows = [
        {
            "id": fid,
            "count": counts[fid],
            "png_bytes": reports[fid]["png_bytes"],
            "lz76": reports[fid]["lz76_factors"],
            "class": reports[fid]["wolfram_class"],
        }
        for fid in joined
        if fid not in excluded
    ]
    complexity.write_aggregate_csv(scatter_rows, out_dir / "count_vs_complexity.csv")

    points = [
        (counts[fid], reports[fid]["normalized_lz76"])
        for fid in joined
        if fid not in excluded
    ]
    corr = complexity.correlation(points)
    lines = [
        f"joined functions: {len(joined)} (scatter rows after exclusions: {len(scatter_rows)})",
        f"count-only ids (no complexity report): {mismatched_counts}" if mismatched_counts else "count-only ids: none",
        f"report-only ids (not in distribution): {mismatched_reports}" if mismatched_reports else "report-only ids: none",
        f"pearson r (count vs normalized LZ76): {corr.pearson_r:.4f}"
        + (" [degenerate]" if corr.degenerate else ""),
        f"points: {corr.n_points}",
    ]
    (out_dir / "correlation.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo("\n".join(lines))


def main() -> None:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_INPUT)
    except click.Abort:
        sys.exit(EXIT_INPUT)
    except (ValueError, OSError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INPUT)
    except Exception:
        traceback.print_exc()
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    main()

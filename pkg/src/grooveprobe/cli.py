"""Command-line entry point: feature extraction, probing, scatter and PCA outputs.

Exit codes: 0 success, 1 input error, 2 numerical failure.  A JSON
``--config`` file may hold any flag value (keys named like the flags,
underscores for dashes); explicit command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

import grooveprobe
from grooveprobe.audio import AudioError
from grooveprobe.corpus import (
    Corpus,
    ManifestError,
    RATING_TARGETS,
    derive_groove_rating,
    load_manifest,
)
from grooveprobe.embeddings import EmbeddingError, MIR_FEATURES, assemble_design_matrix
from grooveprobe.features import FEATURE_NAMES, extract_feature_vector
from grooveprobe.probe import ProbeConfig, ProbeResult, run_cv
from grooveprobe.projection import fit_pca, project
from grooveprobe.reporting import (
    atomic_write_text,
    config_hash,
    fmt9,
    provenance_header,
    results_json,
    summary_csv,
    summary_markdown,
    svg_scatter,
)

INPUT_ERRORS = (ManifestError, AudioError, EmbeddingError, ValueError, OSError)
NUMERICAL_ERRORS = (np.linalg.LinAlgError, ArithmeticError)

STYLE_PALETTE = ("#1f5fbf", "#bf3f1f", "#2f9f4f", "#9f2fbf", "#bf9f1f", "#1fbfbf")

DEFAULTS = {
    "sample_rate": 44100,
    "alpha": 0.2,
    "folds": 4,
    "seeds": "0,1,2,3,4",
    "standardize": True,
    "targets": ",".join(RATING_TARGETS),
    "format": "md",
    "keep_going": False,
    "components": 2,
    "svg": False,
    "stems": None,
    "feature_table": None,
    "emb_root": None,
}


class CliError(ValueError):
    pass


def _threads() -> int:
    env = os.environ.get("GROOVE_PROBE_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _effective(args: argparse.Namespace) -> dict:
    """Merge built-in defaults, --config file values, and explicit flags."""
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_values = json.load(fh)
        unknown = set(file_values) - set(DEFAULTS) - {
            "manifest", "out", "representations", "results",
        }
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
        values.update(file_values)
    for key, value in vars(args).items():
        if key in ("command", "config"):
            continue
        if value is not None:
            values[key] = value
    return values


def _parse_list(text: str) -> list[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse_seeds(text) -> tuple[int, ...]:
    if isinstance(text, (list, tuple)):
        return tuple(int(s) for s in text)
    return tuple(int(s) for s in _parse_list(text))


def _load_corpus(manifest: str | None) -> Corpus:
    if not manifest:
        raise CliError("--manifest is required")
    return derive_groove_rating(load_manifest(manifest))


def cmd_features(args: argparse.Namespace) -> int:
    opts = _effective(args)
    if not opts.get("out"):
        raise CliError("--out is required")
    corpus = load_manifest(opts["manifest"]) if opts.get("manifest") else _load_corpus(None)
    cfg_hash = config_hash(
        {"command": "features", "sample_rate": opts["sample_rate"]}
    )

    rows = []
    failures = []
    ordered_tracks = sorted(corpus.tracks, key=lambda t: t.id)
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = [
            (track.id, pool.submit(extract_feature_vector, track, int(opts["sample_rate"])))
            for track in ordered_tracks
        ]
        for tid, future in futures:
            try:
                vec = future.result()
            except INPUT_ERRORS as exc:
                failures.append((tid, str(exc)))
                if not opts["keep_going"]:
                    for _, f in futures:
                        f.cancel()
                    raise CliError(f"track {tid!r}: {exc}") from exc
                continue
            rows.append((tid, vec.values))

    buf = io.StringIO()
    buf.write(provenance_header(cfg_hash))
    buf.write("id," + ",".join(FEATURE_NAMES) + "\n")
    for tid, values in rows:
        buf.write(tid + "," + ",".join(fmt9(v) for v in values) + "\n")
    atomic_write_text(os.path.join(opts["out"], "features.csv"), buf.getvalue())

    for tid, message in failures:
        print(f"error: track {tid!r}: {message}", file=sys.stderr)
    return 1 if failures else 0


def _expand_representations(reps: list[str], stems: str | None) -> list[str]:
    if not stems:
        return reps
    stem_list = _parse_list(stems)
    expanded = []
    for rep in reps:
        if rep == MIR_FEATURES or "/" in rep:
            expanded.append(rep)
            continue
        for stem in stem_list:
            expanded.append(rep if stem == "full" else f"{rep}/{stem}")
    return expanded


def cmd_probe(args: argparse.Namespace) -> int:
    opts = _effective(args)
    if not opts.get("out"):
        raise CliError("--out is required")
    if not opts.get("representations"):
        raise CliError("--representations is required")
    corpus = _load_corpus(opts.get("manifest"))
    reps = _expand_representations(
        _parse_list(opts["representations"]), opts.get("stems")
    )
    targets = _parse_list(opts["targets"])
    for target in targets:
        if target not in RATING_TARGETS:
            raise CliError(f"unknown target {target!r}")
    seeds = _parse_seeds(opts["seeds"])
    cfg_hash = config_hash(
        {
            "command": "probe",
            "alpha": opts["alpha"],
            "folds": opts["folds"],
            "seeds": list(seeds),
            "standardize": opts["standardize"],
            "representations": reps,
            "targets": targets,
        }
    )

    def one(rep: str, target: str) -> ProbeResult:
        config = ProbeConfig(
            alpha=float(opts["alpha"]),
            folds=int(opts["folds"]),
            seeds=seeds,
            standardize=bool(opts["standardize"]),
            target=target,
        )
        design = assemble_design_matrix(
            corpus,
            rep,
            emb_root=opts.get("emb_root"),
            feature_table=opts.get("feature_table"),
        )
        return run_cv(design, corpus.target_vector(target), config)

    jobs = [(rep, target) for rep in reps for target in targets]
    results: dict[tuple[str, str], ProbeResult] = {}
    failures: list[tuple[str, str, str]] = []
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        futures = {job: pool.submit(one, *job) for job in jobs}
        for job in jobs:
            try:
                results[job] = futures[job].result()
            except INPUT_ERRORS + NUMERICAL_ERRORS as exc:
                failures.append((*job, str(exc)))

    # Serialize in fixed (representation, target) order regardless of scheduling.
    out = opts["out"]
    for rep, target in jobs:
        if (rep, target) not in results:
            continue
        config = ProbeConfig(
            alpha=float(opts["alpha"]),
            folds=int(opts["folds"]),
            seeds=seeds,
            standardize=bool(opts["standardize"]),
            target=target,
        )
        name = f"results_{rep.replace('/', '-')}_{target}.json"
        atomic_write_text(
            os.path.join(out, name), results_json(results[(rep, target)], config, cfg_hash)
        )

    ordered_results = [results[job] for job in jobs if job in results]
    header = provenance_header(cfg_hash)
    md = header + summary_markdown(ordered_results, reps)
    atomic_write_text(os.path.join(out, "summary.md"), md)
    atomic_write_text(
        os.path.join(out, "summary.csv"), header + summary_csv(ordered_results, reps)
    )
    if opts["format"] == "csv":
        print(summary_csv(ordered_results, reps), end="")
    else:
        print(summary_markdown(ordered_results, reps), end="")

    for rep, target, message in failures:
        print(f"error: {rep}/{target}: {message}", file=sys.stderr)
    return 1 if failures else 0


def cmd_scatter(args: argparse.Namespace) -> int:
    opts = _effective(args)
    if not getattr(args, "results", None):
        raise CliError("--results is required")
    if not opts.get("out"):
        raise CliError("--out is required")
    with open(args.results, encoding="utf-8") as fh:
        payload = json.load(fh)
    target = payload["target"]
    rep = payload["representation"]
    predictions = payload["predictions"]
    corpus = _load_corpus(opts.get("manifest"))

    missing = [tid for tid in corpus.ordered_ids if tid not in predictions]
    if missing:
        raise CliError(f"results file has no prediction for tracks: {missing}")

    truth = corpus.target_vector(target)
    pred = np.array([predictions[tid] for tid in corpus.ordered_ids])
    cfg_hash = config_hash({"command": "scatter", "results": os.path.basename(args.results)})

    stem = f"scatter_{rep.replace('/', '-')}_{target}"
    buf = io.StringIO()
    buf.write(provenance_header(cfg_hash))
    buf.write("id,truth,prediction\n")
    for tid, t, p in zip(corpus.ordered_ids, truth, pred):
        buf.write(f"{tid},{fmt9(t)},{fmt9(p)}\n")
    atomic_write_text(os.path.join(opts["out"], stem + ".csv"), buf.getvalue())

    svg = svg_scatter(
        truth, pred, xlabel=f"{target} rating (ground truth)",
        ylabel=f"{target} rating (predicted)", identity_line=True,
    )
    atomic_write_text(os.path.join(opts["out"], stem + ".svg"), svg)
    return 0


def cmd_pca(args: argparse.Namespace) -> int:
    opts = _effective(args)
    if not opts.get("out"):
        raise CliError("--out is required")
    if not opts.get("representations"):
        raise CliError("--representations is required")
    corpus = _load_corpus(opts.get("manifest"))
    reps = _parse_list(opts["representations"])
    components = int(opts["components"])
    if components > corpus.n - 1:
        raise CliError(
            f"components={components} exceeds n-1={corpus.n - 1} for this corpus"
        )
    cfg_hash = config_hash(
        {
            "command": "pca",
            "components": components,
            "standardize": opts["standardize"],
            "representations": reps,
        }
    )
    groove = corpus.target_vector("groove")
    styles = [corpus.track(tid).style_label or "" for tid in corpus.ordered_ids]

    for rep in reps:
        design = assemble_design_matrix(
            corpus, rep, emb_root=opts.get("emb_root"),
            feature_table=opts.get("feature_table"),
        )
        X = design.rows
        if opts["standardize"]:
            sd = X.std(axis=0)
            X = (X - X.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
        model = fit_pca(X, components)
        scores = project(model, X)

        stem = f"pca_{rep.replace('/', '-')}"
        buf = io.StringIO()
        buf.write(provenance_header(cfg_hash))
        buf.write("id,style,pc1,pc2,groove_rating\n")
        for i, tid in enumerate(design.row_ids):
            buf.write(
                f"{tid},{styles[i]},{fmt9(scores[i, 0])},"
                f"{fmt9(scores[i, 1] if components > 1 else 0.0)},{fmt9(groove[i])}\n"
            )
        atomic_write_text(os.path.join(opts["out"], stem + ".csv"), buf.getvalue())

        if opts["svg"]:
            unique_styles = sorted(set(styles))
            palette = {
                s: STYLE_PALETTE[i % len(STYLE_PALETTE)]
                for i, s in enumerate(unique_styles)
            }
            colors = [palette[s] for s in styles]
            svg = svg_scatter(
                scores[:, 0],
                scores[:, 1] if components > 1 else np.zeros(len(styles)),
                xlabel="PC1",
                ylabel="PC2",
                identity_line=False,
                colors=colors,
                legend=palette,
            )
            atomic_write_text(os.path.join(opts["out"], stem + ".svg"), svg)
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", help="track manifest CSV")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--config", help="JSON config file; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="groove-probe",
        description="Probe audio representations for groove-rating prediction.",
    )
    parser.add_argument(
        "--version", action="version", version=f"groove-probe {grooveprobe.__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("features", help="extract the 16 handcrafted features")
    _add_common(p)
    p.add_argument("--sample-rate", type=int, dest="sample_rate")
    p.add_argument("--keep-going", action="store_true", default=None, dest="keep_going")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("probe", help="run ridge probes and emit tables")
    _add_common(p)
    p.add_argument("--emb-root", dest="emb_root", help="embedding directory root")
    p.add_argument("--representations", help="comma list: model[/stem] or mir_features")
    p.add_argument("--stems", help="comma list of stems to expand model names over")
    p.add_argument("--feature-table", dest="feature_table", help="features.csv path")
    p.add_argument("--targets", help="comma list of rating targets")
    p.add_argument("--alpha", type=float)
    p.add_argument("--folds", type=int)
    p.add_argument("--seeds", help="comma list of run seeds")
    p.add_argument(
        "--standardize",
        action=argparse.BooleanOptionalAction,
        default=None,
    )
    p.add_argument("--format", choices=("md", "csv"))
    p.add_argument("--keep-going", action="store_true", default=None, dest="keep_going")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("scatter", help="truth-vs-prediction scatter outputs")
    _add_common(p)
    p.add_argument("--results", help="results JSON from the probe command")
    p.set_defaults(func=cmd_scatter)

    p = sub.add_parser("pca", help="project representations onto principal components")
    _add_common(p)
    p.add_argument("--emb-root", dest="emb_root")
    p.add_argument("--representations")
    p.add_argument("--feature-table", dest="feature_table")
    p.add_argument("--components", type=int)
    p.add_argument(
        "--standardize",
        action=argparse.BooleanOptionalAction,
        default=None,
    )
    p.add_argument("--svg", action="store_true", default=None)
    p.set_defaults(func=cmd_pca)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

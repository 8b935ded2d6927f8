"""groove-extract: batch embedding extraction and stem separation."""
import argparse
import sys

from . import __version__
from .extract import ExtractorError, ExtractorJob, extract_embeddings
from .registry import EXTRACTOR_REGISTRY
from .separate import separate_stems


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="groove-extract")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    embed = sub.add_parser("embed", help="write embedding files for one model")
    embed.add_argument("--manifest", required=True)
    embed.add_argument("--model", required=True, choices=sorted(EXTRACTOR_REGISTRY))
    embed.add_argument("--out", required=True)
    embed.add_argument(
        "--stems",
        default="full",
        help="comma-separated stem modes (full, bass, drums, vocals, other)",
    )
    embed.add_argument("--device", default="cpu")
    embed.add_argument("--backend", default="spectral")
    embed.add_argument("--format", default="csv", choices=("csv", "gemb"))
    embed.add_argument("--chunk-seconds", type=float, default=0.0)
    embed.add_argument("--workers", type=int, default=4)
    embed.add_argument("--keep-going", action="store_true")

    stems = sub.add_parser("stems", help="separate each track into 4 stem WAVs")
    stems.add_argument("--manifest", required=True)
    stems.add_argument("--out", required=True)
    stems.add_argument("--keep-going", action="store_true")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "embed":
            for stem in args.stems.split(","):
                job = ExtractorJob(
                    manifest=args.manifest,
                    model=args.model,
                    out_root=args.out,
                    stem=stem.strip(),
                    device=args.device,
                    backend=args.backend,
                    file_format=args.format,
                    chunk_seconds=args.chunk_seconds,
                    keep_going=args.keep_going,
                    workers=args.workers,
                )
                written = extract_embeddings(job)
                print(f"{args.model}/{stem.strip()}: {len(written)} files")
        else:
            results = separate_stems(args.manifest, args.out, args.keep_going)
            print(f"separated {len(results)} tracks into 4 stems each")
    except ExtractorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

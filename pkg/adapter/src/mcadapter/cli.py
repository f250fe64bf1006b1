"""CLI for the inference adapter: export-predictions and export-complexity."""

from __future__ import annotations

import argparse
import sys

from .adapter import AdapterConfig, export_complexity_probs, export_predictions


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mcadapter", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--items", required=True, help="items file (JSON array or JSONL)")
        p.add_argument("--model", required=True, help="model path or identifier")
        p.add_argument("--out", required=True, help="output file path")
        p.add_argument("--batch-size", type=int, default=4)
        p.add_argument("--max-length", type=int, default=512)
        p.add_argument("--device", default="cpu")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("export-predictions", help="per-option probabilities for each item")
    add_common(p)
    p.add_argument("--variant", choices=["QOC", "QO"], default="QOC")

    p = sub.add_parser("export-complexity", help="easy/medium/hard probabilities for each item")
    add_common(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = AdapterConfig(
        model=args.model,
        variant=getattr(args, "variant", "QOC"),
        batch_size=args.batch_size,
        max_length=args.max_length,
        device=args.device,
        seed=args.seed,
    )
    try:
        if args.command == "export-predictions":
            doc = export_predictions(args.items, config, args.out)
            print(f"wrote {len(doc['entries'])} {config.variant} entries to {args.out}")
        else:
            triples = export_complexity_probs(args.items, config, args.out)
            print(f"wrote {len(triples)} complexity triples to {args.out}")
        return 0
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

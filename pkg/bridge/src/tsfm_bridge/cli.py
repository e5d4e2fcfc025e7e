"""Entry point: `tsfm-bridge --family chronos-bolt --variant tiny`."""

from __future__ import annotations

import argparse
import os
import sys

from .config import FAMILY_VARIANTS, BridgeConfig, BridgeConfigError
from .models import ModelLoadError, load_forecaster
from .protocol import serve_forecaster


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsfm-bridge",
        description="Serve a pre-trained forecaster over the stdio protocol",
    )
    parser.add_argument(
        "--family", required=True, choices=sorted(FAMILY_VARIANTS),
    )
    parser.add_argument("--variant", default="", help="size tag, e.g. tiny")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--api-key", dest="api_key",
                        help="API key (timegpt); NIXTLA_API_KEY also works")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--num-samples", dest="num_samples", type=int,
                        default=20)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = BridgeConfig(
            model_family=args.family,
            variant=args.variant,
            device=args.device,
            api_key=args.api_key or os.environ.get("NIXTLA_API_KEY"),
            seed=args.seed,
            num_samples=args.num_samples,
        )
    except BridgeConfigError as exc:
        print(f"tsfm-bridge: {exc}", file=sys.stderr)
        return 2
    try:
        forecast = load_forecaster(config)
    except ModelLoadError as exc:
        print(f"tsfm-bridge: {exc}", file=sys.stderr)
        return 2
    return serve_forecaster(config, forecast)


if __name__ == "__main__":
    sys.exit(main())

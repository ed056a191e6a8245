"""``mixfractal`` command-line entry point."""

import argparse
import json
import logging
import os
import sys

from .errors import ConfigError, MixfractalError
from .pipeline import RunConfig, run_pipeline

log = logging.getLogger("mixfractal")
DIAG_PREFIX = "mixfractal:error"


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="mixfractal", description=__doc__)
    sub = p.add_subparsers(dest="mode", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--output-dir")
        sp.add_argument("--orders", help="comma-separated cumulant orders, e.g. 2,3,4")
        sp.add_argument("--wavelet", choices=("haar", "d4"))
        sp.add_argument("--min-blocks", type=int)

    s = sub.add_parser("synthesize", help="write a synthetic mixed-fractal trace")
    s.add_argument("--config", required=True)
    common(s)

    a = sub.add_parser("analyze", help="scan an external trace CSV")
    a.add_argument("--input", required=True)
    a.add_argument("--config")
    common(a)

    pl = sub.add_parser("pipeline", help="synthesize replicas and analyse them")
    pl.add_argument("--config", required=True)
    pl.add_argument("--replicas", type=int)
    pl.add_argument("--jobs", type=int)
    common(pl)
    return p


def config_from_args(args):
    """File values first, then command-line flags on top."""
    data = _load_config(args.config) if getattr(args, "config", None) else {}
    data["mode"] = args.mode
    if args.mode == "analyze":
        data["input_path"] = args.input
        data.pop("flow", None)
    overrides = {
        "seed": args.seed,
        "output_dir": args.output_dir,
        "wavelet": args.wavelet,
        "min_blocks": args.min_blocks,
        "replicas": getattr(args, "replicas", None),
        "jobs": getattr(args, "jobs", None),
    }
    if args.orders:
        try:
            overrides["orders"] = [int(m) for m in args.orders.split(",")]
        except ValueError:
            raise ConfigError(f"--orders must be comma-separated integers, got {args.orders!r}") from None
    data.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig.from_dict(data)


def main(argv=None):
    logging.basicConfig(
        level=os.environ.get("MIXFRACTAL_LOG", "WARNING").upper(),
        format="%(name)s:%(levelname)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        status = run_pipeline(config)
        print(f"wrote {config.mode} artifacts to {config.output_dir}")
        return status
    except MixfractalError as exc:
        print(f"{DIAG_PREFIX}:{exc.code}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    except OSError as exc:
        print(f"{DIAG_PREFIX}:io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

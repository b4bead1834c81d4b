"""Command-line entry point.

Usage: spinchaos <analysis> --config <file> [--out <dir>] [--seed <u64>]

Exit codes: 0 ok, 2 config error, 3 numeric/contract error, 4 resource cap.
The SPINCHAOS_THREADS environment variable caps BLAS thread counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys


def _apply_thread_env():
    threads = os.environ.get("SPINCHAOS_THREADS") or str(os.cpu_count() or 2)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        os.environ.setdefault(var, threads)
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(int(threads))
    except (ImportError, ValueError):
        pass


def main(argv=None) -> int:
    _apply_thread_env()  # must precede numpy import

    from .config import ANALYSES, parse_config
    from .errors import ConfigError, NumericsError, ResourceError, SpinChaosError
    from .runner import run

    parser = argparse.ArgumentParser(
        prog="spinchaos",
        description="Exact-diagonalization chaos statistics for dipolar spin systems",
    )
    parser.add_argument("analysis", choices=ANALYSES, help="analysis to run")
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", help="output directory (overrides config)")
    parser.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"config error: invalid JSON: {exc}", file=sys.stderr)
        return 2

    if not isinstance(raw, dict):
        print("config error: config must be a JSON object", file=sys.stderr)
        return 2
    raw.setdefault("analysis", args.analysis)
    if raw["analysis"] != args.analysis:
        print(
            f"config error: analysis: config says {raw['analysis']!r} but "
            f"command line says {args.analysis!r}",
            file=sys.stderr,
        )
        return 2
    if args.out is not None:
        raw["out_dir"] = args.out
    if args.seed is not None:
        raw["seed"] = args.seed

    try:
        cfg = parse_config(raw)
        files = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 4
    except NumericsError as exc:
        print(f"{cfg.analysis if 'cfg' in dir() else 'run'}: numeric error: {exc}",
              file=sys.stderr)
        return 3
    except SpinChaosError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    for name in files:
        print(f"wrote {cfg.out_dir}/{name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

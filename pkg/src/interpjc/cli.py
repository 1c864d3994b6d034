"""Command-line front end: ``interpjc run | figure | scan | verify``.

Exit codes: 0 success, 1 invalid configuration, 2 numerical verification
failure, 3 I/O failure. Errors are reported on stderr as a single line
``interpjc: error code=<n> kind=<kind> message=<json string>``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import ModelPreset
from .harness import (
    OUTPUT_KINDS,
    ConfigError,
    RunConfig,
    ScanConfig,
    VerificationError,
    config_from_metadata,
    parse_values,
    run,
    scan,
)

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _error_line(code: int, kind: str, message: str) -> str:
    return f"interpjc: error code={code} kind={kind} message={json.dumps(message)}"


def read_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` file; blank lines and ``#`` comments ignored."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


RUN_KEYS = {
    "model": str, "k": float, "xi": float, "delta": float, "nbar": float, "t_max": float,
    "steps": int, "cutoff": str, "outputs": str, "out": str, "lam": float, "phase": float,
}


def _run_config(args) -> RunConfig:
    if args.meta:
        try:
            meta = json.loads(Path(args.meta).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"unreadable metadata {args.meta}: {exc}") from None
        return config_from_metadata(meta, args.out or "series.csv")

    merged = {}
    if args.config:
        for key, value in read_config_file(args.config).items():
            key = "lam" if key == "lambda" else key
            if key not in RUN_KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                merged[key] = RUN_KEYS[key](value)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
    for key in RUN_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    model = None
    if merged.get("model"):
        try:
            model = ModelPreset(merged["model"], merged.get("k", 1.0))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    cutoff = merged.get("cutoff", "auto")
    try:
        cutoff = None if str(cutoff) == "auto" else int(cutoff)
    except ValueError:
        raise ConfigError(f"cutoff must be an integer or 'auto', got {cutoff!r}") from None
    outputs = merged.get("outputs", "series")
    outputs = frozenset(o.strip() for o in outputs.split(",") if o.strip())
    return RunConfig(
        model=model,
        xi=merged.get("xi"),
        delta=merged.get("delta"),
        nbar=merged.get("nbar", 3.0),
        t_max=merged.get("t_max", 2.0),
        steps=merged.get("steps", 2001),
        cutoff=cutoff,
        outputs=outputs,
        out_path=Path(merged.get("out", "series.csv")),
        lam=merged.get("lam", 1.0),
        phase=merged.get("phase", 0.0),
    )


def cmd_run(args) -> int:
    config = _run_config(args)
    result = run(config)
    for msg in result.messages:
        print(msg)
    for f in result.files:
        print(f"wrote {f}")
    if result.exit_code == EXIT_VERIFY:
        raise VerificationError("; ".join(result.failures))
    return result.exit_code


def cmd_figure(args) -> int:
    from .figures import FigureSpec, figure

    spec = FigureSpec(args.figure, args.panel)
    for f in figure(spec, args.out_dir, t_max=args.t_max, steps=args.steps):
        print(f"wrote {f}")
    return EXIT_OK


def cmd_scan(args) -> int:
    config = ScanConfig(
        xi_values=tuple(parse_values(args.xi)),
        delta_values=tuple(parse_values(args.delta)),
        nbar=args.nbar,
        t_max=args.t_max,
        steps=args.steps,
        cutoff=None if args.cutoff in (None, "auto") else int(args.cutoff),
        paired=args.paired,
        lam=args.lam,
    )
    result = scan(config, args.out)
    for f in result.files:
        print(f"wrote {f}")
    if result.exit_code:
        raise VerificationError("; ".join(result.failures))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import format_table, reference_end_times, run_checks

    rows = run_checks(args.seed)
    print(format_table(rows))
    print()
    print("reference: paradox end-times at <n> = 3 (quoted +/- 0.05; informational)")
    for name, end, quoted, ok in reference_end_times():
        status = "match" if ok else "DIFFERS"
        print(f"{status:<8} {name:<10} computed {end if end is None else round(end, 4)}  quoted {quoted}")
    return EXIT_OK if all(ok for _, ok, _ in rows) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="interpjc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="simulate one parameter point and write a series CSV")
    p.add_argument("--model", help="preset: JCM, BSM, SM or RLM")
    p.add_argument("--k", type=float, help="k for SM/RLM presets (default 1)")
    p.add_argument("--xi", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--nbar", type=float, help="mean photon number of the initial coherent state")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--cutoff", help="Fock cutoff or 'auto'")
    p.add_argument("--outputs", help=f"comma list from {','.join(OUTPUT_KINDS)}")
    p.add_argument("--phase", type=float)
    p.add_argument("--lambda", dest="lam", type=float, help="coupling; rescales the reported time column")
    p.add_argument("--out", help="series CSV path")
    p.add_argument("--config", help="flat key=value file; flags take precedence")
    p.add_argument("--meta", help="rerun from a .meta.json sidecar")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("figure", help="write per-curve CSVs and a plot script for a figure")
    p.add_argument("figure", type=int, choices=[1, 2, 3, 4])
    p.add_argument("--panel")
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--steps", type=int, default=2001)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("scan", help="long-form CSV over a (xi, delta) grid")
    p.add_argument("--xi", required=True, help="'0,0.5,1' or 'start:stop:num'")
    p.add_argument("--delta", required=True)
    p.add_argument("--paired", action="store_true", help="zip xi and delta lists instead of a grid")
    p.add_argument("--nbar", type=float, default=3.0)
    p.add_argument("--t-max", dest="t_max", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=1001)
    p.add_argument("--cutoff")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--out", default="scan.csv")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("verify", help="run the invariant suite and print a pass/fail table")
    p.add_argument("--seed", type=int, default=12345)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(_error_line(EXIT_CONFIG, "invalid_config", str(exc)), file=sys.stderr)
        return EXIT_CONFIG
    except VerificationError as exc:
        print(_error_line(EXIT_VERIFY, "verification_failed", str(exc)), file=sys.stderr)
        return EXIT_VERIFY
    except OSError as exc:
        print(_error_line(EXIT_IO, "io_error", str(exc)), file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

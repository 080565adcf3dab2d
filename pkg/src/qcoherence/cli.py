"""Command-line interface: ``qcoherence {sweep,analyze,selftest,state}``.

Exit codes: 0 success, 1 selftest failure, 2 usage or validation error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import selftest
from .coherence import OUTPUTS, decomposition_report
from .minimizers import OptimOptions
from .quantum import StateValidationError, dumps_state, load_state
from .spin_models import ModelSpec, ground_state
from .states import FACTORY
from .sweep import ConfigError, build_config, fmt, parse_config_text, parse_number, run_sweep

EXIT_OK, EXIT_SELFTEST, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _optim_flags(p):
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--ansatz-k", type=int, help="mixture component count, or basis size cap per large group")
    p.add_argument("--family", choices=("product-basis", "mixture"))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qcoherence", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="sweep a parameter and write one CSV row per grid point")
    sw.add_argument("--config", help="key=value config file")
    sw.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config entry")
    sw.add_argument("--scenario", choices=("ising2", "werner-ghz", "w-state", "xxz", "file"))
    sw.add_argument("--out")
    sw.add_argument("--threads", type=int)
    sw.add_argument("--outputs", help=f"comma list from {','.join(OUTPUTS)}")
    sw.add_argument("--allow-slow", action="store_true", help="permit c_total/c_local/c_intrinsic for xxz at N >= 8")
    _optim_flags(sw)

    an = sub.add_parser("analyze", help="full coherence report for a state file")
    an.add_argument("path")
    an.add_argument("--out")
    _optim_flags(an)

    st = sub.add_parser("selftest", help="run the analytic-oracle and metric suites")
    st.add_argument("--seed", type=int, default=0)

    mk = sub.add_parser("state", help="write a named state to a file")
    mk.add_argument("name", choices=sorted(FACTORY) + ["ising2-ground", "xxz-ground"])
    mk.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    mk.add_argument("--out")
    return parser


def _pairs(items) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"expected KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _optim(args) -> OptimOptions:
    return OptimOptions(
        restarts=args.restarts,
        max_iterations=args.max_iter or 2000,
        objective_tolerance=args.tol or 1e-9,
        seed=args.seed or 0,
        K_override=args.ansatz_k,
    )


def cmd_sweep(args) -> int:
    raw = parse_config_text(Path(args.config).read_text()) if args.config else {}
    raw.update(_pairs(args.set))
    flag_keys = {"scenario": args.scenario, "out": args.out, "threads": args.threads, "outputs": args.outputs,
                 "seed": args.seed, "restarts": args.restarts, "max_iter": args.max_iter, "tol": args.tol,
                 "ansatz_k": args.ansatz_k, "family": args.family}
    raw.update({k: str(v) for k, v in flag_keys.items() if v is not None})
    if args.allow_slow:
        raw["allow_slow"] = "true"
    config = build_config(raw)
    text = run_sweep(config)
    if not config.output_path:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_analyze(args) -> int:
    rho = load_state(args.path)
    rep = decomposition_report(rho, None, _optim(args), family=args.family or "product-basis")
    lines = [f"n_sites = {rep.n_sites}"] + [f"{k} = {fmt(v)}" for k, v in rep.records()]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_state(args) -> int:
    params = _pairs(args.set)
    if args.name == "ising2-ground":
        spec = ModelSpec("ising2", N=2, J=parse_number(params.get("J", "1")),
                         lam=parse_number(params.get("lambda", "1")), eps=parse_number(params.get("epsilon", "0.2")))
        rho = ground_state(spec).state
    elif args.name == "xxz-ground":
        spec = ModelSpec("xxz", N=int(parse_number(params.get("N", "10"))), J=parse_number(params.get("J", "1")),
                         delta=parse_number(params.get("delta", "1")), boundary=params.get("boundary", "periodic"))
        rho = ground_state(spec).state
    else:
        rho = FACTORY[args.name]({k: parse_number(v) for k, v in params.items()})
    text = dumps_state(rho)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "selftest":
            return EXIT_OK if selftest.run(args.seed) else EXIT_SELFTEST
        return {"sweep": cmd_sweep, "analyze": cmd_analyze, "state": cmd_state}[args.command](args)
    except (ConfigError, StateValidationError, ValueError, OSError) as exc:
        print(f"qcoherence: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point.

    timebin-qec reject  --config cfg.json [--out DIR] [--seed N] [--trials N]
    timebin-qec correct --config cfg.json ...
    timebin-qec sweep   --config cfg.json ...
    timebin-qec verify  --config cfg.json ...

Exit codes: 0 ok, 1 oracle mismatch, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import jsonio
from .config import RunConfig, load_config
from .errors import ConfigError
from .harness import SWEEP_HEADERS, haar_qubits, run_experiment, run_sweep
from .oracle import VERIFY_TOL, verify_oracle
from .protocols import Protocol
from .state import Qubit

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("timebin_qec")


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def cmd_experiment(cfg: RunConfig, protocol: Protocol, out: Path) -> int:
    report = run_experiment(cfg.experiment(protocol))
    _write(out / "report.json", report.to_json())
    _write(out / "trials.csv", report.to_csv())
    agg = report.aggregates
    if protocol is Protocol.REJECT:
        print(f"mean acceptance {jsonio.format_float(agg['mean_accept'])} over {agg['trials']} trials")
    else:
        print(
            f"mean port1 {jsonio.format_float(agg['mean_port1'])}, "
            f"mean port2 {jsonio.format_float(agg['mean_port2'])} over {agg['trials']} trials"
        )
    print(f"wrote {out / 'report.json'} and {out / 'trials.csv'}")
    return EXIT_OK


def cmd_reject(cfg: RunConfig, out: Path) -> int:
    return cmd_experiment(cfg, Protocol.REJECT, out)


def cmd_correct(cfg: RunConfig, out: Path) -> int:
    return cmd_experiment(cfg, Protocol.CORRECT, out)


def _sweep_qubit(cfg: RunConfig) -> Qubit:
    if cfg.qubits is not None and cfg.qubits.kind == "fixed":
        return cfg.qubits.qubit
    a, b = haar_qubits(cfg.seed, 0)[0].tolist()
    return Qubit(a, b)


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    if cfg.sweep is None:
        raise ConfigError("sweep: section required for the sweep command")
    spec = cfg.sweep
    q = _sweep_qubit(cfg)
    rows = run_sweep(spec.protocol, q, spec.thetas, spec.phi, spec.chi)
    header = SWEEP_HEADERS[spec.protocol]
    _write(out / "sweep.csv", jsonio.csv_text(header, rows))
    doc = {
        "schema_version": 1,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "qubit": {"alpha": [q.alpha.real, q.alpha.imag], "beta": [q.beta.real, q.beta.imag]},
        "columns": list(header),
        "rows": rows,
    }
    _write(out / "sweep.json", jsonio.dumps(doc) + "\n")
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    if cfg.verify_samples is None:
        raise ConfigError("verify.samples: required for the verify command")
    deviations = verify_oracle(cfg.verify_samples, cfg.seed)
    ok = True
    for protocol, dev in deviations.items():
        passed = math.isfinite(dev) and dev < VERIFY_TOL
        ok &= passed
        print(
            f"{protocol.value}: max |sparse - dense| = {dev:.3e} over "
            f"{cfg.verify_samples} samples [{'ok' if passed else 'MISMATCH'}]"
        )
    return EXIT_OK if ok else EXIT_MISMATCH


COMMANDS = {
    "reject": cmd_reject,
    "correct": cmd_correct,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="timebin-qec",
        description="Single-photon time-bin error rejection/correction simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "reject": "Monte Carlo run of the error-rejection protocol",
        "correct": "Monte Carlo run of the error-correction protocol",
        "sweep": "exact probabilities over a theta grid",
        "verify": "cross-check sparse propagation against the dense oracle",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, type=Path, help="JSON config file")
        p.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--trials", type=int, help="override the config trial count")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config).with_overrides(seed=args.seed, trials=args.trials)
        return COMMANDS[args.command](cfg, args.out)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

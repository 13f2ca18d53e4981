"""Command-line front end for the Monte Carlo harness.

Two subcommands:
  run    repeated sessions under one configuration, JSON/CSV report
  sweep  detection-rate curve over a list of auth check counts

Exit status is 0 for a completed run and 1 for a configuration error.
"""
from __future__ import annotations

import argparse
import sys

from .adversary import AttackModel, AttackVariant, Channel, InvalidAttackError, NO_ATTACK
from .ecc import check_distance_rule, codec_by_name
from .harness import RunSpec, run, sweep_detection_curve
from .protocol import ConfigError, SessionConfig


def parse_complex(text: str) -> complex:
    """Parse a complex number written as "re,im" (or a bare real)."""
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected 're,im', got {text!r}")


def parse_message(text: str) -> str:
    """Accept a bit string, or hex (0x-prefixed or containing hex digits)."""
    if text.startswith(("0x", "0X")):
        hexpart = text[2:]
    elif all(c in "01" for c in text) and text:
        return text
    else:
        hexpart = text
    try:
        return "".join(format(int(c, 16), "04b") for c in hexpart)
    except ValueError:
        raise argparse.ArgumentTypeError(f"message must be bits or hex, got {text!r}") from None


def parse_channels(text: str) -> frozenset[Channel]:
    out = set()
    for name in text.split(","):
        name = name.strip()
        if not name:
            continue
        try:
            out.add(Channel(name))
        except ValueError:
            valid = ", ".join(c.value for c in Channel)
            raise argparse.ArgumentTypeError(f"unknown channel {name!r}; one of: {valid}") from None
    return frozenset(out)


def _default_channels(attack: str, protocol: str) -> frozenset[Channel]:
    if attack in ("intercept", "entangle-cnot"):
        return frozenset({Channel.TRENT_TO_ALICE})
    if attack == "entangle-general":
        msg = Channel.ALICE_TO_BOB if protocol == "qdc1" else Channel.ALICE_TO_TRENT
        return frozenset({msg})
    return frozenset()


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--protocol", choices=["qdc1", "qdc2"], default="qdc1")
    p.add_argument("--n-ghz", type=int, default=128, help="GHZ triples per session")
    p.add_argument("--auth-check-bits", type=int, default=16, help="auth check positions m")
    p.add_argument("--msg-check-fraction", type=float, default=0.25)
    p.add_argument("--message", type=parse_message, default=None,
                   help="fixed message, bits or hex; default draws a fresh one per trial")
    p.add_argument("--message-bits", type=int, default=64,
                   help="random message length when --message is not given; 0 for none")
    p.add_argument("--ecc", default="none", help="none | rep3 | rep5 | hamming74")
    p.add_argument("--attack", choices=[v.value for v in AttackVariant], default="none")
    p.add_argument("--attack-channels", type=parse_channels, default=None,
                   help="comma list of trent-alice, trent-bob, alice-bob, alice-trent")
    p.add_argument("--attack-coverage", type=float, default=1.0)
    p.add_argument("--alpha", type=parse_complex, default=None, help='complex as "re,im"')
    p.add_argument("--beta", type=parse_complex, default=None, help='complex as "re,im"')
    p.add_argument("--alpha-p", type=parse_complex, default=None, help='complex as "re,im"')
    p.add_argument("--beta-p", type=parse_complex, default=None, help='complex as "re,im"')
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threshold-auth", type=float, default=0.0)
    p.add_argument("--threshold-msg", type=float, default=0.0)
    p.add_argument("--out", default=None, help="output path; default stdout")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghzqdc",
        description="Monte Carlo simulator for authenticated direct messaging over GHZ triples",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="run repeated sessions and report statistics")
    _add_common_flags(run_p)
    sweep_p = sub.add_parser("sweep", help="detection-rate curve over auth check counts")
    _add_common_flags(sweep_p)
    sweep_p.add_argument("--m-values", default="1,2,5,10,20",
                         help="comma list of auth check counts")
    return parser


def _build_attack(args) -> AttackModel:
    variant = AttackVariant(args.attack)
    if variant == AttackVariant.NONE:
        return NO_ATTACK
    channels = args.attack_channels
    if channels is None:
        channels = _default_channels(args.attack, args.protocol)
    extra = {}
    for name, flag in (
        ("alpha", args.alpha),
        ("beta", args.beta),
        ("alpha_p", args.alpha_p),
        ("beta_p", args.beta_p),
    ):
        if flag is not None:
            extra[name] = flag
    return AttackModel(
        variant=variant, channels=channels, coverage=args.attack_coverage, **extra
    )


def _build_spec(args) -> RunSpec:
    codec = codec_by_name(args.ecc)
    config = SessionConfig(
        n_ghz=args.n_ghz,
        m_auth_check=args.auth_check_bits,
        check_fraction_msg=args.msg_check_fraction,
        error_threshold_auth=args.threshold_auth,
        error_threshold_msg=args.threshold_msg,
        codec=codec,
        protocol_variant=args.protocol,
        record_transcript=False,
        record_eve=True,
    )
    message = args.message
    message_bits = len(message) if message is not None else args.message_bits
    return RunSpec(
        config=config,
        attack=_build_attack(args),
        trials=args.trials,
        seed=args.seed,
        message_bits=message_bits if message_bits > 0 else None,
        message=message,
        out=args.out,
        fmt=args.format,
    )


def _emit_output(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)


def _warn_distance_rule(spec: RunSpec) -> None:
    codec = spec.config.codec
    if codec.name == "none":
        return
    # Advisory only: expected raw error rate under the configured attack.
    rate = spec.attack.coverage * 0.5 if spec.attack.variant != AttackVariant.NONE else 0.0
    if rate > 0 and not check_distance_rule(rate, codec.n, codec.d):
        sys.stderr.write(
            f"warning: codec distance d={codec.d} may be too small for an "
            f"expected raw error rate of {rate:.2f} on n={codec.n} blocks\n"
        )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = _build_spec(args)
        if args.command == "run":
            _warn_distance_rule(spec)
            report = run(spec)
            text = report.to_json() if spec.fmt == "json" else report.to_csv()
        else:
            m_values = [int(v) for v in args.m_values.split(",") if v.strip()]
            sweep_spec = spec
            report = sweep_detection_curve(sweep_spec, m_values)
            text = report.to_json() if spec.fmt == "json" else report.to_csv()
        _emit_output(text, spec.out)
    except (ConfigError, InvalidAttackError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())

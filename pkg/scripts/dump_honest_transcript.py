#!/usr/bin/env python3
"""Print the full event transcript of one small honest session.

Also the generator for tests/data/golden_session.jsonl; run with --out to
refresh that fixture after an intentional format change.
"""
import argparse

from ghzqdc.adversary import NO_ATTACK
from ghzqdc.authkeys import Counter, Shake256Hash, UserIdentity, derive_key
from ghzqdc.protocol import SessionConfig, run_session


def golden_session():
    h = Shake256Hash()
    alice = derive_key(UserIdentity("1011001110001111", "alice"), h, Counter(0), needed=20)
    bob = derive_key(UserIdentity("0100110001110000", "bob"), h, Counter(0), needed=20)
    config = SessionConfig(
        n_ghz=20, m_auth_check=2, check_fraction_msg=0.25, rng_seed=2024
    )
    return run_session(config, alice, bob, "1101", NO_ATTACK)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=None, help="write JSONL here instead of stdout")
    args = parser.parse_args()
    result = golden_session()
    text = result.transcript.to_jsonl()
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
        print(f"wrote {args.out} ({len(result.transcript)} events)")
    else:
        print(text, end="")


if __name__ == "__main__":
    main()

"""Command-line entry point.

Exit status: 0 on success, 1 when the domain says no (reject, deny, refused
transaction, invalid input data), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import BENCH_KAPPA, DEFAULT_SIZES, report_csv, run_bench, write_report
from .circuit import Circuit, PublicInputs
from .compiler import load_bundle, load_config, sign_data
from .compiler.bundle import CIRCUIT_FILE, PUBLICS_FILE, parse_manifest
from .crypto import KeyPair, SchnorrSignature
from .curve import CurvePoint
from .errors import ProvenZKError
from .ledger import Ledger, Policy, verify_audit_chain
from .zkproof import CLI_KAPPA, SoundnessTarget, prove, verify

PROOF_FILE = "proof.bin"


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--ledger", default="ledger.log", help="transaction log path")
    p.add_argument("--keys", default="keys", help="key directory")
    p.add_argument("--kappa", type=int, default=None, help="soundness bits")
    p.add_argument("--seed", default=None, help="seed for reproducible randomness")
    p.add_argument("--out", default=None, help="output path")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="provenzk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", parents=[common], help="create an authority key pair")
    p.add_argument("--name", default="authority")

    p = sub.add_parser("sign-data", parents=[common], help="hash and sign the config's data")
    p.add_argument("config")
    p.add_argument("--key", default=None, help="secret key file (default: <keys>/authority.sk)")

    p = sub.add_parser("compile", parents=[common], help="compile a config into a bundle")
    p.add_argument("config")

    p = sub.add_parser("prove", parents=[common], help="prove a compiled bundle")
    p.add_argument("bundle")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", parents=[common], help="verify a proof against a bundle")
    p.add_argument("bundle")
    p.add_argument("proof")
    p.add_argument("--publics", default=None, help="public-inputs file overriding the bundle's")

    p = sub.add_parser("bench", parents=[common], help="proving-time benchmark")
    p.add_argument("--sizes", default=",".join(map(str, DEFAULT_SIZES)))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-plot", action="store_true")

    lp = sub.add_parser("ledger", help="ledger administration")
    lsub = lp.add_subparsers(dest="ledger_command", required=True)
    lsub.add_parser("init", parents=[common])
    q = lsub.add_parser("register-provider", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--key", required=True, help="public key file or hex")
    q.add_argument("--data-class", action="append", required=True)
    q = lsub.add_parser("rotate-key", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--provider-id", type=int, required=True)
    q.add_argument("--key", required=True)
    q = lsub.add_parser("mint-token", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--analyst", required=True)
    q.add_argument("--data-class", required=True)
    q.add_argument("--expiry", type=int, required=True)
    q.add_argument("--max-uses", type=int, required=True)
    q.add_argument("--function-id", action="append", default=[],
                   help="hex function_id or bundle directory; repeatable")
    q = lsub.add_parser("check-access", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--token", type=int, required=True)
    q.add_argument("--data-class", required=True)
    q.add_argument("--function-id", required=True)
    q.add_argument("--now", type=int, required=True)
    q = lsub.add_parser("register-verifier", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--bundle", required=True)
    q = lsub.add_parser("submit-proof", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--bundle", required=True)
    q.add_argument("--proof", default=None)
    q.add_argument("--provider-id", type=int, required=True)
    q.add_argument("--publics", default=None)
    q = lsub.add_parser("revoke", parents=[common])
    q.add_argument("--actor", required=True)
    q.add_argument("--token", type=int, required=True)
    lsub.add_parser("audit", parents=[common])
    lsub.add_parser("verify-chain", parents=[common])
    lsub.add_parser("export", parents=[common])
    for q in lsub.choices.values():
        if q.prog.split()[-1] not in ("init", "check-access", "audit", "verify-chain", "export"):
            q.add_argument("--ts", type=int, default=None, help="logical timestamp")
    return parser


# --- helpers -----------------------------------------------------------------

def _read(path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_key_bytes(spec: str) -> bytes:
    p = Path(spec)
    if p.exists():
        return p.read_bytes()
    try:
        return bytes.fromhex(spec)
    except ValueError:
        raise UsageError(f"--key: {spec!r} is neither a file nor hex") from None


def _function_id(spec: str) -> str:
    p = Path(spec)
    if p.is_dir():
        return parse_manifest(_read(p / "manifest.txt").decode())["function_id"]
    try:
        bytes.fromhex(spec)
    except ValueError:
        raise UsageError(f"--function-id: {spec!r} is neither a bundle nor hex") from None
    return spec.lower()


def _seed_bytes(seed):
    return None if seed is None else str(seed).encode()


def _open_ledger(args, must_exist=True) -> Ledger:
    path = Path(args.ledger)
    if must_exist and not path.exists():
        raise UsageError(f"--ledger: {path} does not exist (run 'ledger init')")
    return Ledger(path)


def _ts(args, ledger: Ledger) -> int:
    return args.ts if args.ts is not None else len(ledger.transactions) + 1


# --- commands ----------------------------------------------------------------

def cmd_keygen(args) -> int:
    seed = None if args.seed is None else int(args.seed) if str(args.seed).isdigit() else args.seed
    kp = KeyPair.generate(seed=seed)
    keys = Path(args.out or args.keys)
    keys.mkdir(parents=True, exist_ok=True)
    (keys / f"{args.name}.sk").write_bytes(kp.secret_bytes())
    (keys / f"{args.name}.pk").write_bytes(kp.public_bytes())
    print(f"public_key {kp.public_bytes().hex()}")
    print(f"wrote {keys / (args.name + '.sk')} and {keys / (args.name + '.pk')}")
    return 0


def cmd_sign_data(args) -> int:
    cfg = _load_cfg(args.config, require_authority=False)
    key_path = Path(args.key) if args.key else Path(args.keys) / "authority.sk"
    kp = KeyPair.from_secret_bytes(_read(key_path))
    h_w, sig = sign_data(cfg, kp)
    print(f"H_w {h_w.hex()}")
    print(f"public_key {kp.public_bytes().hex()}")
    print(f"signature {sig.to_bytes().hex()}")
    if args.out:
        Path(args.out).write_bytes(sig.to_bytes())
        print(f"wrote {args.out}")
    return 0


def _load_cfg(path, require_authority=True):
    if not Path(path).is_file():
        raise UsageError(f"config: {path} is not a file")
    return load_config(path, require_authority=require_authority)


def cmd_compile(args) -> int:
    from .compiler import compile_config
    cfg = _load_cfg(args.config)
    bundle = compile_config(cfg)
    out = Path(args.out or "bundle")
    bundle.write(out)
    stats = bundle.circuit.stats()
    print(f"circuit_id {bundle.circuit_id.hex()}")
    print(f"function_id {bundle.function_id.hex()}")
    print("result " + " ".join(f"{lbl}={v}" for lbl, v in
                               zip(bundle.function.result_labels, bundle.native_result)))
    print(f"gates {stats['gates']} mul_gates {stats['mul_gates']} wires {stats['wires']}")
    print(f"wrote {out}")
    return 0


def cmd_prove(args) -> int:
    bundle = load_bundle(args.bundle)
    target = SoundnessTarget(args.kappa if args.kappa is not None else CLI_KAPPA)
    proof = prove(bundle.circuit, bundle.witness(), bundle.publics, target,
                  seed=_seed_bytes(args.seed), workers=args.workers)
    out = Path(args.out) if args.out else Path(args.bundle) / PROOF_FILE
    data = proof.to_bytes()
    out.write_bytes(data)
    print(f"t {proof.t} proof_bytes {len(data)}")
    print(f"wrote {out}")
    return 0


def cmd_verify(args) -> int:
    bundle = Path(args.bundle)
    circuit = Circuit.parse(_read(bundle / CIRCUIT_FILE))
    publics = PublicInputs.from_text(_read(args.publics or bundle / PUBLICS_FILE).decode())
    verdict = verify(circuit, publics, _read(args.proof))
    print(verdict)
    return 0 if verdict else 1


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"--sizes: expected comma-separated integers, got {args.sizes!r}") from None
    if not sizes or any(n < 2 for n in sizes):
        raise UsageError("--sizes: need at least one size >= 2")
    kappa = args.kappa if args.kappa is not None else BENCH_KAPPA
    seed = int(args.seed) if args.seed is not None else 0

    def log(row):
        print(f"# N={row.N} t={row.t} prove={row.prove_ms:.0f}ms verify={row.verify_ms:.0f}ms",
              file=sys.stderr)

    rows = run_bench(sizes, kappa=kappa, seed=seed, workers=args.workers, log=log)
    sys.stdout.write(report_csv(rows))
    if args.out:
        for kind, path in write_report(rows, args.out, plot=not args.no_plot).items():
            print(f"# wrote {kind} {path}", file=sys.stderr)
    return 0


def cmd_ledger(args) -> int:
    sub = args.ledger_command
    if sub == "init":
        path = Path(args.ledger)
        if path.exists():
            raise UsageError(f"--ledger: {path} already exists")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(b"")
        print(f"initialized {path}")
        return 0
    led = _open_ledger(args)
    if sub == "register-provider":
        pk = CurvePoint.from_bytes(_read_key_bytes(args.key))
        tid = led.register_provider(args.actor, pk, args.data_class, ts=_ts(args, led))
        print(f"provider_id {tid}")
    elif sub == "rotate-key":
        led.update_provider_key(args.actor, args.provider_id, _read_key_bytes(args.key),
                                ts=_ts(args, led))
        print("ok")
    elif sub == "mint-token":
        policy = Policy.make(args.data_class, args.expiry, args.max_uses,
                             [_function_id(f) for f in args.function_id])
        print(f"token_id {led.mint_access_token(args.actor, args.analyst, policy, ts=_ts(args, led))}")
    elif sub == "check-access":
        decision = led.check_access(args.actor, args.token, args.data_class,
                                    _function_id(args.function_id), args.now)
        print(decision)
        return 0 if decision else 1
    elif sub == "register-verifier":
        b = Path(args.bundle)
        manifest = parse_manifest(_read(b / "manifest.txt").decode())
        led.register_verifier(args.actor, manifest["function_id"], manifest["circuit_id"],
                              _read(b / CIRCUIT_FILE), ts=_ts(args, led))
        print(f"registered function_id {manifest['function_id']}")
    elif sub == "submit-proof":
        b = Path(args.bundle)
        manifest = parse_manifest(_read(b / "manifest.txt").decode())
        publics = PublicInputs.from_text(_read(args.publics or b / PUBLICS_FILE).decode())
        sig = SchnorrSignature.from_bytes(_read(b / "signature.bin"))
        proof = _read(args.proof or b / PROOF_FILE)
        result = led.submit_proof(args.actor, manifest["function_id"], args.provider_id,
                                  publics, sig, proof, ts=_ts(args, led))
        print(result)
        return 0 if result else 1
    elif sub == "revoke":
        led.revoke(args.actor, args.token, ts=_ts(args, led))
        print("ok")
    elif sub == "audit":
        for e in led.audit:
            print(f"{e.index}\t{e.timestamp}\t{e.action}\t{e.actor}\t{e.outcome}\t"
                  f"{e.entry_hash.hex()[:16]}\t{e.detail}")
        print(f"state_hash {led.state_hash.hex()}")
    elif sub == "verify-chain":
        ok = verify_audit_chain(led)
        print(f"chain {'valid' if ok else 'INVALID'} ({len(led.audit)} entries)")
        return 0 if ok else 1
    elif sub == "export":
        snap = led.export_snapshot()
        if args.out:
            Path(args.out).write_text(snap)
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(snap)
    return 0


COMMANDS = {"keygen": cmd_keygen, "sign-data": cmd_sign_data, "compile": cmd_compile,
            "prove": cmd_prove, "verify": cmd_verify, "bench": cmd_bench, "ledger": cmd_ledger}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ProvenZKError as exc:
        print(f"rejected: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: key generation, encrypt/decrypt, structure audits,
and secrecy reports.

Every subcommand is a thin adapter over the library; reports are JSON with a
reproducibility header carrying the tool version and the resolved parameter
set.  Exit codes: 0 success, 1 validation problem, 2 solver or budget
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .codec import (
    SparseMessage,
    decrypt,
    encrypt,
    load_cipher,
    load_message,
    save_vector,
)
from .errors import (
    BudgetError,
    CsSecrecyError,
    DimensionError,
    DomainError,
    RecoveryError,
    SolverError,
    ValidationError,
)
from .keymatrix import (
    SecretKey,
    derive_matrix,
    load_key,
    matrix_to_csv,
    save_key,
)
from .ripcheck import rip_constant, spark
from .secrecy import (
    KeyEnsemble,
    cs_ensemble_joint,
    exact_mi,
    ideal_t1_joint,
    ideal_t2_joint,
    prune_candidates,
    t1_closed_form,
)

BUDGET_ENV = "CS_SECRECY_BUDGET"


class _Parser(argparse.ArgumentParser):
    # usage problems are validation errors: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _budget_override() -> int | None:
    raw = os.environ.get(BUDGET_ENV)
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(f"{BUDGET_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValidationError(f"{BUDGET_ENV} must be positive, got {value}")
    return value


def _emit(args, payload: dict) -> None:
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command", "output") and v is not None}
    report = {
        "tool": "cs-secrecy",
        "version": __version__,
        "command": args.command,
        "params": params,
    }
    report.update(payload)
    text = json.dumps(report, indent=2) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_message_list(path) -> list[SparseMessage]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"message list file is not valid JSON: {exc}") from exc
    if not isinstance(raw, list):
        raise ValidationError("message list file must contain a JSON array of vector objects")
    messages = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "entries" not in item:
            raise ValidationError(f"message {i} must be an object with 'n' and 'entries'")
        entries = item["entries"]
        if item.get("n") != len(entries):
            raise ValidationError(f"message {i}: field 'n' does not match the entry count")
        messages.append(SparseMessage(np.array(entries, dtype=float)))
    return messages


def _cmd_keygen(args) -> None:
    key = SecretKey(seed=args.seed, m=args.m, n=args.n)
    save_key(key, args.key_out)
    payload = {"key_file": args.key_out}
    if args.export_matrix:
        with open(args.export_matrix, "w", encoding="utf-8") as fh:
            fh.write(matrix_to_csv(derive_matrix(key)))
        payload["matrix_file"] = args.export_matrix
    _emit(args, payload)


def _cmd_encrypt(args) -> None:
    key = load_key(args.key)
    message = load_message(args.message)
    # identity dictionary: the composed operator equals the derived matrix
    cipher = encrypt(derive_matrix(key), message)
    save_vector(cipher, args.cipher_out)
    _emit(args, {"cipher_file": args.cipher_out, "m": cipher.m})


def _cmd_decrypt(args) -> None:
    key = load_key(args.key)
    cipher = load_cipher(args.cipher)
    recovered = decrypt(key, cipher, args.k, solver=args.solver)
    save_vector(recovered, args.plain_out)
    _emit(args, {"plain_file": args.plain_out, "n": recovered.n})


def _cmd_rip(args) -> None:
    key = load_key(args.key)
    budget = _budget_override()
    kwargs = {} if budget is None else {"budget": budget}
    report = rip_constant(derive_matrix(key), args.k, **kwargs)
    _emit(args, {"report": report.to_dict()})


def _cmd_spark(args) -> None:
    key = load_key(args.key)
    budget = _budget_override()
    kwargs = {} if budget is None else {"budget": budget}
    report = spark(derive_matrix(key), **kwargs)
    _emit(args, {"report": report.to_dict()})


def _cmd_mi_ideal(args) -> None:
    if args.model == "t1":
        joint = ideal_t1_joint(args.t, method=args.method)
        payload = {"report": exact_mi(joint).to_dict(), "closed_form_bits": t1_closed_form(args.t)}
    else:
        joint = ideal_t2_joint(args.t)
        payload = {"report": exact_mi(joint).to_dict()}
    _emit(args, payload)


def _cmd_mi_ensemble(args) -> None:
    try:
        seeds = [int(part) for part in args.seeds.split(",") if part.strip()]
    except ValueError as exc:
        raise ValidationError(f"--seeds must be comma-separated integers, got {args.seeds!r}") from exc
    if not seeds:
        raise ValidationError("--seeds must name at least one seed")
    keys = KeyEnsemble(tuple(SecretKey(seed=s, m=args.m, n=args.n) for s in seeds))
    messages = _load_message_list(args.messages)
    budget = _budget_override()
    kwargs = {} if budget is None else {"budget": budget}
    joint = cs_ensemble_joint(keys, messages, bin_width=args.bin_width, **kwargs)
    if args.export_joint:
        with open(args.export_joint, "w", encoding="utf-8") as fh:
            fh.write(joint.to_csv())
    _emit(args, {"report": exact_mi(joint).to_dict(), "t_x": joint.t_x, "t_y": joint.t_y})


def _cmd_prune(args) -> None:
    cipher = load_cipher(args.cipher)
    candidates = _load_message_list(args.candidates)
    result = prune_candidates(cipher, args.epsilon, candidates)
    index_of = {id(msg): i for i, msg in enumerate(candidates)}
    survivor_ids = [index_of[id(msg)] for msg in result.survivors]
    norm_y = float(np.linalg.norm(cipher.entries))
    _emit(
        args,
        {
            "band": [norm_y / (1.0 + args.epsilon), norm_y / (1.0 - args.epsilon)],
            "survivors": survivor_ids,
            "eliminated": [i for i in range(len(candidates)) if i not in survivor_ids],
            "candidate_norms": [float(np.linalg.norm(msg.entries)) for msg in candidates],
        },
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cs-secrecy", description="Compressed-sensing encryption toolkit")
    parser.add_argument("--version", action="version", version=f"cs-secrecy {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="derive and store a secret key")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("-o", "--key-out", required=True, help="key JSON path")
    p.add_argument("--export-matrix", help="also export the derived matrix as CSV")
    p.set_defaults(func=_cmd_keygen)

    p = sub.add_parser("encrypt", help="encrypt a message vector")
    p.add_argument("--key", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("-o", "--cipher-out", required=True)
    p.set_defaults(func=_cmd_encrypt)

    p = sub.add_parser("decrypt", help="decrypt a ciphertext vector")
    p.add_argument("--key", required=True)
    p.add_argument("--cipher", required=True)
    p.add_argument("--k", type=int, required=True, help="sparsity budget shared out of band")
    p.add_argument("--solver", choices=("auto", "omp", "bp", "l0"), default="auto")
    p.add_argument("-o", "--plain-out", required=True)
    p.set_defaults(func=_cmd_decrypt)

    p = sub.add_parser("rip", help="enumerate the isometry constant of one order")
    p.add_argument("--key", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_rip)

    p = sub.add_parser("spark", help="smallest dependent column count")
    p.add_argument("--key", required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_spark)

    p = sub.add_parser("mi-ideal", help="mutual information of an idealized key model")
    p.add_argument("--model", choices=("t1", "t2"), required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--method", choices=("analytic", "enumerate"), default="analytic")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_mi_ideal)

    p = sub.add_parser("mi-ensemble", help="mutual information of a measured seed ensemble")
    p.add_argument("--seeds", required=True, help="comma-separated seed list")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--messages", required=True, help="JSON array of vector objects")
    p.add_argument("--bin-width", type=float, required=True)
    p.add_argument("--export-joint", help="export the joint table as CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_mi_ensemble)

    p = sub.add_parser("prune", help="norm-band candidate pruning for a ciphertext")
    p.add_argument("--cipher", required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--candidates", required=True, help="JSON array of vector objects")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_prune)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValidationError, DimensionError, DomainError) as exc:
        print(f"cs-secrecy: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"cs-secrecy: {exc}", file=sys.stderr)
        return 1
    except (RecoveryError, BudgetError, SolverError) as exc:
        print(f"cs-secrecy: {exc}", file=sys.stderr)
        return 2
    except CsSecrecyError as exc:
        print(f"cs-secrecy: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Exit codes: 0 success, 2 sentence parse error, 3 sentence outside the
supported fragment, 4 computation budget exhausted, 5 file error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .engine import compute_spectrum, wfomc
from .generator import GenLimits, generate
from .logic import FragmentError, ParseError, parse_sentence
from .oeis import StrippedIndex, online_search
from .seqdb import SpectrumDB

PROFILES = {
    "fo2-paper": {"ml": 5, "mc": 2, "up": 1, "bp": 1, "k": 0},
    "c2-paper": {"ml": 5, "mc": 2, "up": 1, "bp": 1, "k": 1},
}

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FRAGMENT = 3
EXIT_BUDGET = 4
EXIT_IO = 5


def read_config(path: str) -> dict[str, str]:
    """key=value file, one per line, # comments."""
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"bad config line: {raw!r}")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Fill unset options from --config; explicit flags win."""
    if not getattr(args, "config", None):
        return
    try:
        cfg = read_config(args.config)
    except OSError as exc:
        parser.error(f"cannot read config: {exc}")
        return
    for key, value in cfg.items():
        if not hasattr(args, key) or getattr(args, key) is not None:
            continue
        current = getattr(args, key)
        if isinstance(current, bool):
            setattr(args, key, value.lower() in ("1", "true", "yes"))
        else:
            setattr(args, key, value)


def _parse_weights(pairs: list[str] | None, slot: int, weights: dict) -> dict:
    for pair in pairs or []:
        name, sep, value = pair.partition("=")
        if not sep:
            raise ValueError(f"expected NAME=INT, got {pair!r}")
        w = weights.get(name, (1, 1))
        weights[name] = (int(value), w[1]) if slot == 0 else (w[0], int(value))
    return weights


def _weights_from_args(args: argparse.Namespace) -> dict | None:
    weights: dict = {}
    _parse_weights(getattr(args, "w", None), 0, weights)
    _parse_weights(getattr(args, "wbar", None), 1, weights)
    return weights or None


def _limits_from_args(args: argparse.Namespace) -> GenLimits:
    base = dict(PROFILES[args.profile]) if args.profile else {}
    for key in ("ml", "mc", "up", "bp", "k"):
        value = getattr(args, key)
        if value is not None:
            base[key] = int(value)
    missing = [k for k in ("ml", "mc", "up", "bp") if k not in base]
    if missing:
        raise ValueError(f"missing limits (set --profile or {missing})")
    return GenLimits(
        max_literals=base["ml"],
        max_clauses=base["mc"],
        unary=base["up"],
        binary=base["bp"],
        max_count=base.get("k", 0),
    )


def _spectrum_job(job: tuple[str, int, float]) -> tuple[str, list[str], bool]:
    text, length, budget = job
    s = parse_sentence(text)
    sp = compute_spectrum(s, length, budget_secs=budget)
    return text, [str(t) for t in sp.terms], sp.truncated


def cmd_wfomc(args: argparse.Namespace) -> int:
    s = parse_sentence(args.sentence)
    value = wfomc(s, args.n, weights=_weights_from_args(args))
    print(value)
    return EXIT_OK


def cmd_spectrum(args: argparse.Namespace) -> int:
    s = parse_sentence(args.sentence)
    length = int(args.length) if args.length is not None else 10
    budget = float(args.budget_secs) if args.budget_secs is not None else None
    sp = compute_spectrum(
        s, length, weights=_weights_from_args(args), budget_secs=budget
    )
    if args.json:
        print(
            json.dumps(
                {
                    "sentence": s.render(),
                    "terms": [str(t) for t in sp.terms],
                    "truncated": sp.truncated,
                }
            )
        )
    else:
        for t in sp.terms:
            print(t)
    return EXIT_BUDGET if sp.truncated else EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    limits = _limits_from_args(args)
    layers = int(args.layers) if args.layers is not None else 3
    length = int(args.length) if args.length is not None else 10
    budget = float(args.budget_secs) if args.budget_secs is not None else 30.0
    workers = int(args.workers) if args.workers is not None else 1
    profile = args.profile or "custom"

    result = generate(limits, layers)
    jobs = []
    layer_of = {}
    for i, layer in enumerate(result.kept):
        for s in layer:
            text = s.render()
            layer_of[text] = i + 1
            jobs.append((text, length, budget))

    spectra: dict[str, tuple[list[str], bool]] = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for text, terms, truncated in pool.map(
                _spectrum_job, jobs, chunksize=4
            ):
                spectra[text] = (terms, truncated)
    else:
        for job in jobs:
            text, terms, truncated = _spectrum_job(job)
            spectra[text] = (terms, truncated)

    db = SpectrumDB(args.db) if args.db else None
    per_layer: list[dict] = [
        {"layer": i + 1, "kept": len(result.kept[i]), "unique": 0}
        for i in range(len(result.kept))
    ]
    for text in sorted(spectra, key=lambda t: (layer_of[t], t)):
        terms, truncated = spectra[text]
        layer = layer_of[text]
        if db is not None:
            rec = db.insert(
                text,
                [int(t) for t in terms],
                truncated=truncated,
                layer=layer,
                profile=profile,
            )
            if rec.status == "unique":
                per_layer[layer - 1]["unique"] += 1
    if db is not None:
        # insert-time product checks only see earlier records; settle order
        demoted = db.reclassify_products()
        if demoted:
            for row in per_layer:
                row["unique"] = 0
            for rec in db.records():
                if (
                    rec.status == "unique"
                    and rec.layer is not None
                    and 1 <= rec.layer <= len(per_layer)
                ):
                    per_layer[rec.layer - 1]["unique"] += 1

    if args.json:
        doc = {"layers": per_layer, "truncated": result.truncated}
        if db is not None:
            doc["db"] = db.stats()
        print(json.dumps(doc))
    else:
        for row in per_layer:
            line = f"layer {row['layer']}: kept {row['kept']}"
            if db is not None:
                line += f", unique {row['unique']}"
            print(line)
        if db is not None:
            print(f"db: {db.stats()}")
    return EXIT_BUDGET if result.truncated else EXIT_OK


def cmd_db(args: argparse.Namespace) -> int:
    # inspection never creates a database, so a missing path is an error
    if not Path(args.db).exists():
        raise FileNotFoundError(args.db)
    db = SpectrumDB(args.db)
    if args.db_command == "stats":
        print(json.dumps(db.stats()))
        return EXIT_OK
    records = db.records()
    if args.status:
        records = [r for r in records if r.status == args.status]
    for rec in records:
        print(rec.to_json())
    return EXIT_OK


def cmd_oeis(args: argparse.Namespace) -> int:
    index = StrippedIndex.load(args.stripped) if args.stripped else None

    def lookup(terms: list[int]) -> list[str]:
        hits = index.match(terms) if index is not None else []
        if not hits and args.online:
            hits = online_search(terms)
        return hits

    if args.terms:
        terms = [int(t) for t in args.terms.replace(",", " ").split()]
        hits = lookup(terms)
        if args.json:
            print(json.dumps({"terms": terms, "matches": hits}))
        else:
            for h in hits:
                print(h)
        return EXIT_OK

    if not args.db:
        raise ValueError("oeis needs --terms or --db")
    db = SpectrumDB(args.db)
    rows = []
    for rec in db.unique_records():
        hits = lookup(list(rec.spectrum))
        if hits:
            db.set_oeis(rec.id, hits[0])
        rows.append({"sentence": rec.sentence, "matches": hits})
        if not args.json:
            shown = ",".join(hits) if hits else "-"
            print(f"{shown}\t{rec.sentence}")
    if args.json:
        print(json.dumps(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combspec",
        description="Model-count spectra of two-variable sentences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value defaults file")
        p.add_argument("--json", action="store_true", help="JSON output")

    p = sub.add_parser("wfomc", help="weighted model count at one size")
    p.add_argument("sentence")
    p.add_argument("--n", type=int, required=True, help="domain size")
    p.add_argument("--w", action="append", metavar="NAME=INT")
    p.add_argument("--wbar", action="append", metavar="NAME=INT")
    add_common(p)
    p.set_defaults(func=cmd_wfomc)

    p = sub.add_parser("spectrum", help="model counts for n = 1..length")
    p.add_argument("sentence")
    p.add_argument("--length", help="number of terms (default 10)")
    p.add_argument("--budget-secs", dest="budget_secs")
    p.add_argument("--w", action="append", metavar="NAME=INT")
    p.add_argument("--wbar", action="append", metavar="NAME=INT")
    add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("generate", help="enumerate sentences, store spectra")
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--ml", help="max literals per clause")
    p.add_argument("--mc", help="max clauses")
    p.add_argument("--up", help="unary predicates")
    p.add_argument("--bp", help="binary predicates")
    p.add_argument("--k", help="max counting parameter (0 disables)")
    p.add_argument("--layers", help="refinement depth (default 3)")
    p.add_argument("--length", help="spectrum length (default 10)")
    p.add_argument("--budget-secs", dest="budget_secs", help="per-spectrum budget")
    p.add_argument("--workers", help="parallel spectrum workers")
    p.add_argument("--db", help="JSONL database path")
    add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("db", help="inspect a spectrum database")
    p.add_argument("db_command", choices=["stats", "export"])
    p.add_argument("--db", required=True)
    p.add_argument("--status", help="filter export by status")
    add_common(p)
    p.set_defaults(func=cmd_db)

    p = sub.add_parser("oeis", help="match spectra against OEIS")
    p.add_argument("--terms", help="comma-separated integers")
    p.add_argument("--db", help="match every unique record in this database")
    p.add_argument("--stripped", help="path to OEIS stripped dump (.gz ok)")
    p.add_argument("--online", action="store_true", help="query oeis.org")
    add_common(p)
    p.set_defaults(func=cmd_oeis)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _merge_config(args, parser)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FragmentError as exc:
        print(f"unsupported fragment: {exc}", file=sys.stderr)
        return EXIT_FRAGMENT
    except OSError as exc:
        print(f"file error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

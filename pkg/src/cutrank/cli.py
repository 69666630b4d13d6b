"""Command-line front end: ``cutrank {rank,classes,shoda,atlas} ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import re
import sys
from collections.abc import Sequence
from dataclasses import dataclass

from . import atlas
from .classes import Tag, class_partition
from .groups import FiniteGroup, GroupTooLarge
from .groupspec import GroupSpecError, parse_group_spec
from .isomorphism import DEFAULT_BUDGET, IsomorphismUndecided
from .rank import InconsistencyError, rank_ferraz
from .shoda import (
    ShodaError,
    detect_pq_family,
    rank_from_pairs,
    shoda_pairs_cyclic,
    shoda_pairs_dihedral,
    shoda_pairs_metacyclic_pq,
    shoda_pairs_quaternion,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_UNSUPPORTED = 4
EXIT_INCONSISTENT = 5

FAMILIES = ("auto", "cyclic", "dihedral", "quaternion", "metacyclic-pq")

log = logging.getLogger("cutrank")


class UnsupportedFamily(Exception):
    pass


@dataclass(frozen=True)
class CliConfig:
    command: str
    spec: str | None
    fmt: str
    cap: int | None
    workers: int
    iso_budget: int
    fixtures: str | None
    deterministic: bool


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _common_options(suppress: bool) -> argparse.ArgumentParser:
    # subcommand copies suppress their defaults so options given before the
    # subcommand are not overwritten
    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", dest="fmt", choices=("json", "csv", "text"), default=d("json"))
    common.add_argument("--cap", type=_positive, default=d(None),
                        help="largest group order to build (default $CUTRANK_CAP or 2048)")
    common.add_argument("--workers", type=_positive, default=d(os.cpu_count() or 1))
    common.add_argument("--iso-budget", type=_positive, default=d(DEFAULT_BUDGET),
                        help="node budget for each isomorphism search")
    common.add_argument("--fixtures", default=d(None), help="fixture CSV replacing the bundled tables")
    common.add_argument("--deterministic", action="store_true", default=d(False),
                        help="classify candidates sequentially in a fixed order")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cutrank", description=__doc__, parents=[_common_options(False)])
    common = _common_options(True)
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("rank", parents=[common], help="central unit rank of a group")
    p.add_argument("spec")
    p = sub.add_parser("classes", parents=[common], help="per-class rationality table")
    p.add_argument("spec")
    p = sub.add_parser("shoda", parents=[common], help="rank from extremely strong Shoda pairs")
    p.add_argument("spec")
    p.add_argument("--family", choices=FAMILIES, default="auto")
    p = sub.add_parser("atlas", parents=[common], help="split metacyclic ecut atlas")
    p.add_argument("mode", choices=("enumerate", "verify"))
    p.add_argument("--wide", action="store_true", help="sweep every n with phi(n) <= 48")
    p.add_argument("--include-abelian", action="store_true",
                   help="list abelian classes in enumerate output")
    return parser


# --------------------------------------------------------------------------
# Output helpers


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _text(pairs: Sequence[tuple[str, object]]) -> str:
    return "".join(f"{k}: {v}\n" for k, v in pairs)


# --------------------------------------------------------------------------
# Subcommands


def cmd_rank(cfg: CliConfig) -> tuple[str, int]:
    G = parse_group_spec(cfg.spec, cap=cfg.cap)
    data = rank_ferraz(G).to_json()
    flat = [k for k in data if k != "witness"]
    if cfg.fmt == "csv":
        return _csv(flat, [[data[k] for k in flat]]), EXIT_OK
    if cfg.fmt == "text":
        return _text([(k, data[k]) for k in flat]), EXIT_OK
    return _json(data), EXIT_OK


def class_rows(G: FiniteGroup) -> list[dict]:
    P = class_partition(G)
    rows = []
    for i, block in enumerate(P.conj):
        g = block[0]
        rows.append({"class": i, "representative": g, "size": len(block),
                     "element_order": int(G.elem_order[g]), "tag": Tag(int(P.tags[g])).name,
                     "real": bool(P.real[g]), "r_block": int(P.r_labels[g]),
                     "q_block": int(P.q_labels[g])})
    return rows


def cmd_classes(cfg: CliConfig) -> tuple[str, int]:
    G = parse_group_spec(cfg.spec, cap=cfg.cap)
    rows = class_rows(G)
    header = list(rows[0])
    if cfg.fmt == "csv":
        return _csv(header, [[r[k] for k in header] for r in rows]), EXIT_OK
    if cfg.fmt == "text":
        lines = ["  ".join(f"{k}={r[k]}" for k in header) for r in rows]
        return "\n".join(lines) + "\n", EXIT_OK
    return _json({"order": G.order, "classes": rows}), EXIT_OK


_SINGLE = re.compile(r"(?P<kind>[CDQ])(?P<k>\d+)|M\((?P<m>\d+,\d+,\d+,\d+)\)")


def detect_family(spec: str) -> tuple[str, tuple[int, ...]]:
    """Family name and its parameters for a single-factor spec."""
    m = _SINGLE.fullmatch(re.sub(r"\s+", "", spec))
    if m is None:
        raise UnsupportedFamily(f"{spec!r} is not a single cyclic, dihedral, quaternion or M(...) factor")
    if m["m"]:
        pq = detect_pq_family(*map(int, m["m"].split(",")))
        if pq is None:
            raise UnsupportedFamily(f"{spec!r} is not a faithful C_(q^m) x| C_(p^n) presentation")
        return "metacyclic-pq", pq
    k = int(m["k"])
    if m["kind"] == "C":
        return "cyclic", (k,)
    if m["kind"] == "D":
        return "dihedral", (k // 2,)
    return "quaternion", (k // 4,)


def cmd_shoda(cfg: CliConfig, family: str) -> tuple[str, int]:
    G = parse_group_spec(cfg.spec, cap=cfg.cap)
    found, params = detect_family(cfg.spec)
    if family != "auto" and family != found:
        raise UnsupportedFamily(f"{cfg.spec!r} is {found}, not {family}")
    if found == "cyclic":
        pairs = shoda_pairs_cyclic(params[0], G)
    elif found == "dihedral":
        pairs = shoda_pairs_dihedral(params[0], G)
    elif found == "quaternion":
        pairs = shoda_pairs_quaternion(params[0], G)
    else:
        p, ep, q, eq = params
        pairs = shoda_pairs_metacyclic_pq(p, ep, q, eq, G.word_form.r, G)
    report = rank_from_pairs(G, pairs)
    oracle = rank_ferraz(G).rank
    ok = oracle == report.rank
    data = {"family": found, "order": G.order, "pairs": [pr.to_json() for pr in pairs],
            "rank": report.rank, "verdict": report.verdict.value, "oracle_rank": oracle,
            "crosscheck": "ok" if ok else "FAILED"}
    code = EXIT_OK if ok else EXIT_INCONSISTENT
    if cfg.fmt == "csv":
        header = list(data["pairs"][0])
        return _csv(header, [[pr[k] for k in header] for pr in data["pairs"]]), code
    if cfg.fmt == "text":
        head = [(k, data[k]) for k in ("family", "order", "rank", "verdict", "oracle_rank", "crosscheck")]
        body = "".join("pair " + " ".join(f"{k}={v}" for k, v in pr.items()) + "\n" for pr in data["pairs"])
        return _text(head) + body, code
    return _json(data), code


def _atlas_classes(cfg: CliConfig, wide: bool) -> list[atlas.AtlasClass]:
    workers = 1 if cfg.deterministic else cfg.workers
    rows = atlas.classify_space(atlas.candidate_space(wide=wide), workers=workers, cap=cfg.cap)
    return atlas.deduplicate(rows, budget=cfg.iso_budget)


def cmd_atlas(cfg: CliConfig, mode: str, wide: bool, include_abelian: bool) -> tuple[str, int]:
    classes = _atlas_classes(cfg, wide)
    if mode == "enumerate":
        shown = [c for c in classes if include_abelian or not c.representative.abelian]
        if cfg.fmt == "json":
            return _json([{"n": c.params.n, "t": c.params.t, "l": c.params.l, "r": c.params.r,
                           "order": c.representative.order, "rank": c.representative.rank,
                           "abelian": c.representative.abelian,
                           "members": [list(m.as_tuple()) for m in c.members]}
                          for c in shown]), EXIT_OK
        rows = [[*c.params.as_tuple(), c.representative.order, c.representative.rank] for c in shown]
        if cfg.fmt == "text":
            return "".join(f"M({n},{t},{l},{r})  order={o}  rank={k}\n"
                           for n, t, l, r, o, k in rows), EXIT_OK
        return _csv(["n", "t", "l", "r", "order", "rank"], rows), EXIT_OK

    fixtures = atlas.load_fixtures(cfg.fixtures)
    report = atlas.verify_tables(classes, fixtures, budget=cfg.iso_budget)
    code = EXIT_OK if report.ok else EXIT_MISMATCH
    data = report.to_json()
    if cfg.fmt == "json":
        return _json(data), code
    summary = [("ok", data["ok"]), ("matched_rank0", data["counts"]["rank0"]),
               ("matched_rank1", data["counts"]["rank1"])]
    summary += [(k, len(data[k])) for k in ("rank_mismatch", "unmatched_fixture", "unmatched_atlas",
                                           "invalid_fixture", "abelian_classes")]
    if cfg.fmt == "csv":
        return _csv([k for k, _ in summary], [[v for _, v in summary]]), code
    return _text(summary), code


# --------------------------------------------------------------------------


def run(argv: Sequence[str] | None = None) -> tuple[str, int]:
    """Parse arguments and execute; returns (stdout text, exit status)."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    cfg = CliConfig(args.command, getattr(args, "spec", None), args.fmt, args.cap,
                    args.workers, args.iso_budget, args.fixtures, args.deterministic)
    try:
        if cfg.command == "rank":
            return cmd_rank(cfg)
        if cfg.command == "classes":
            return cmd_classes(cfg)
        if cfg.command == "shoda":
            return cmd_shoda(cfg, args.family)
        return cmd_atlas(cfg, args.mode, args.wide, args.include_abelian)
    except GroupTooLarge as exc:
        log.error("%s", exc)
        return "", EXIT_CAP
    except IsomorphismUndecided as exc:
        log.error("%s", exc)
        return "", EXIT_CAP
    except GroupSpecError as exc:
        log.error("parse error: %s", exc)
        return "", EXIT_PARSE
    except (UnsupportedFamily, ShodaError) as exc:
        log.error("unsupported family: %s", exc)
        return "", EXIT_UNSUPPORTED
    except InconsistencyError as exc:
        log.error("internal inconsistency: %s", exc)
        return "", EXIT_INCONSISTENT


def main(argv: Sequence[str] | None = None) -> int:
    out, code = run(argv)
    sys.stdout.write(out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

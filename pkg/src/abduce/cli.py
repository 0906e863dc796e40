"""Command-line driver.

Subcommands: ``interpret`` (annotation file in, interpretation annotation
out), ``validate-kb`` (knowledge-base self-check) and ``render`` (static
SVG timeline of a result).  Flag names follow the conventions of the
usual physiologic-record tools (``-r`` record, ``-a`` annotator, ``-o``
output).  stdout never carries data: results go to files and the run
report goes to stderr as JSON, so the tool is pipeline-safe.

Exit codes: 0 success, 1 incomplete result / failed validation,
2 unusable input.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .acquisition import EvidenceBuffer
from .inference import EngineConfig, interpret
from .io_wfdb import read_annotations, write_annotations
from .knowledge import build_ecg_kb, validate_kb
from .model import KnowledgeBase, parse_kb
from .model.interpretation import CostWeights
from .render import render_svg

KB_ENV_VAR = "CONSTRUE_KB"

EXIT_OK = 0
EXIT_INCOMPLETE = 1
EXIT_INPUT_ERROR = 2


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "interpret":
            return _cmd_interpret(args)
        if args.command == "validate-kb":
            return _cmd_validate_kb(args)
        if args.command == "render":
            return _cmd_render(args)
    except BrokenPipeError:
        return EXIT_INPUT_ERROR
    parser.print_usage(sys.stderr)
    return EXIT_INPUT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abduce",
        description="Explanation-based interpretation of annotated event series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_int = sub.add_parser("interpret", help="interpret a beat annotation file")
    p_int.add_argument("-r", "--record", required=True, help="input annotation file")
    p_int.add_argument("-o", "--output", required=True, help="output annotation file")
    p_int.add_argument("--fs", type=float, default=None, help="sampling frequency (Hz)")
    p_int.add_argument("--from", dest="t_from", type=int, default=None, help="start of the interpreted range (ms)")
    p_int.add_argument("--to", dest="t_to", type=int, default=None, help="end of the interpreted range (ms)")
    p_int.add_argument("--k", type=int, default=4, help="nodes expanded per search iteration")
    p_int.add_argument("--max-nodes", type=int, default=20000, help="search node budget")
    p_int.add_argument("--weights", default="1.0,0.5,0.1", help="cost weights: unexplained,pending,instances")
    p_int.add_argument("--kb", default=None, help=f"knowledge-base file (default: ${KB_ENV_VAR} or built-in)")
    p_int.add_argument("--online", action="store_true", help="feed evidence incrementally by horizon")
    p_int.add_argument(
        "--prediction-search",
        dest="prediction_search",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="enable top-down search of the low-confidence channel",
    )

    p_val = sub.add_parser("validate-kb", help="check a knowledge base")
    p_val.add_argument("--kb", default=None, help=f"knowledge-base file (default: ${KB_ENV_VAR} or built-in)")

    p_ren = sub.add_parser("render", help="render an interpretation as SVG")
    p_ren.add_argument("-r", "--record", default=None, help="input annotation file (evidence lane)")
    p_ren.add_argument("-a", "--annotator", required=True, help="interpretation annotation file")
    p_ren.add_argument("-o", "--output", required=True, help="output SVG file")
    p_ren.add_argument("--fs", type=float, default=None, help="sampling frequency (Hz)")
    return parser


def _load_kb(path: Optional[str]) -> KnowledgeBase:
    path = path or os.environ.get(KB_ENV_VAR)
    if path is None:
        return build_ecg_kb()
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kb(fh.read())


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_INPUT_ERROR


def _cmd_interpret(args) -> int:
    try:
        kb = _load_kb(args.kb)
    except (OSError, ValueError) as exc:
        return _fail(f"cannot load knowledge base: {exc}")
    diags = validate_kb(kb)
    if diags:
        for d in diags:
            print(f"kb: {d}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        with open(args.record, "r", encoding="utf-8") as fh:
            result = read_annotations(fh, fs=args.fs, kb=kb)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    try:
        weights = _parse_weights(args.weights)
        cfg = EngineConfig(
            k=args.k,
            max_nodes=args.max_nodes,
            weights=weights,
            online=args.online,
            prediction_search=args.prediction_search,
        )
    except ValueError as exc:
        return _fail(str(exc))

    lo = args.t_from if args.t_from is not None else float("-inf")
    hi = args.t_to if args.t_to is not None else float("inf")
    if args.t_from is not None and args.t_to is not None and not args.t_from < args.t_to:
        return _fail("--from must be below --to")
    buffer = EvidenceBuffer(online=args.online)
    for obs in result.evidence:
        if lo <= obs.t_low <= hi:
            buffer.push(obs, "primary")
    for obs in result.low_confidence:
        if lo <= obs.t_low <= hi:
            buffer.push(obs, "low-confidence")

    interp, report = interpret(kb, buffer, cfg)
    print(json.dumps(report.as_dict(), sort_keys=True), file=sys.stderr)
    if interp is None:
        return EXIT_INCOMPLETE
    with open(args.output, "w", encoding="utf-8") as fh:
        write_annotations(fh, interp, result.record.fs, result.record.name, kb)
    return EXIT_INCOMPLETE if report.incomplete else EXIT_OK


def _cmd_validate_kb(args) -> int:
    try:
        kb = _load_kb(args.kb)
    except (OSError, ValueError) as exc:
        return _fail(f"cannot load knowledge base: {exc}")
    diags = validate_kb(kb)
    for d in diags:
        print(d, file=sys.stderr)
    return EXIT_OK if not diags else EXIT_INCOMPLETE


def _cmd_render(args) -> int:
    record = None
    try:
        if args.record is not None:
            with open(args.record, "r", encoding="utf-8") as fh:
                record = read_annotations(fh, fs=args.fs).record
        with open(args.annotator, "r", encoding="utf-8") as fh:
            interp_record = read_annotations(fh, fs=args.fs).record
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    svg = render_svg(record, interp_record)
    try:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(svg)
    except OSError as exc:
        return _fail(str(exc))
    return EXIT_OK


def _parse_weights(text: str) -> CostWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError("--weights expects three comma-separated numbers")
    wu, wp, wh = (float(p) for p in parts)
    return CostWeights(wu, wp, wh)


if __name__ == "__main__":
    sys.exit(main())

"""``caseforge`` command line: export, check and query assurance cases.

Exit codes are the same for every command: 0 success/pass, 2 a semantic
failure was found, 1 a usage, IO or parse error.  Report content goes to
standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .case_model import CaseError, load_case_file, validate_case
from .checks import CHECK_NAMES, RULE_DRIVEN, CheckError, load_rules_file, run_checks
from .engine import EngineError, prove_negation, solve
from .logic import SafetyError
from .report import Report, render_html, render_text
from .syntax import ParseError, parse_query
from .translator import TranslationError, export_paths, translate_case

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


@dataclass
class CliConfig:
    command: str
    case_path: str
    rules_path: Optional[str] = None
    check_names: List[str] = field(default_factory=list)
    html_path: Optional[str] = None
    query_text: Optional[str] = None
    max_answers: int = 10


def _err(msg: str):
    print(f"caseforge: {msg}", file=sys.stderr)


def _load(cfg: CliConfig):
    case = load_case_file(cfg.case_path)
    diags = [d for d in validate_case(case) if d.severity == "error"]
    if diags:
        for d in diags:
            print(d, file=sys.stderr)
        raise CaseError(f"{cfg.case_path}: {len(diags)} validation error(s)")
    return case


def _emit(report: Report, cfg: CliConfig):
    sys.stdout.write(render_text(report))
    if cfg.html_path:
        Path(cfg.html_path).write_text(render_html(report), encoding="utf-8")


def cmd_export(cfg: CliConfig) -> int:
    case = _load(cfg)
    texts = translate_case(case).texts()
    for part, path in export_paths(cfg.case_path).items():
        Path(path).write_text(texts[part], encoding="utf-8")
        print(path)
    return EXIT_OK


def cmd_check(cfg: CliConfig) -> int:
    names = cfg.check_names or list(CHECK_NAMES)
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise CheckError(f"unknown check {unknown[0]!r}; choose from {', '.join(CHECK_NAMES)}")
    case = _load(cfg)
    rules = load_rules_file(cfg.rules_path) if cfg.rules_path else None
    if rules is None:
        needing = [n for n in names if n in RULE_DRIVEN]
        if cfg.check_names and needing:
            raise CheckError(f"check {needing[0]} needs --rules")
        if needing:
            _err("no --rules given; skipping " + ", ".join(needing))
        names = [n for n in names if n not in RULE_DRIVEN]
    verdicts = run_checks(case, rules, names)
    _emit(Report.from_verdicts("caseforge check", verdicts, case.root), cfg)
    return EXIT_OK if all(v.passed for v in verdicts) else EXIT_FAIL


def cmd_query(cfg: CliConfig) -> int:
    text = cfg.query_text.strip()
    negative = text.startswith("not ")
    query = parse_query(text)
    case = _load(cfg)
    prog = translate_case(case).program
    if negative:
        ans = prove_negation(prog, query)
        answers = [ans] if ans is not None else []
    else:
        answers = solve(prog, query, max_answers=cfg.max_answers)
    title = f"?- {text.rstrip('.')}: {len(answers)} answer(s)"
    lines = []
    for i, a in enumerate(answers, 1):
        binding = ", ".join(f"{k} = {v}" for k, v in a.bindings.items()) or "true"
        lines.append(f"answer {i}: {binding}")
    report = Report(title, (), tuple(a.justification for a in answers), case.root)
    head, _, trees = render_text(report).partition("\n")
    sys.stdout.write(head + "\n" + "".join(l + "\n" for l in lines) + trees)
    if cfg.html_path:
        Path(cfg.html_path).write_text(render_html(report), encoding="utf-8")
    return EXIT_OK if answers else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="caseforge", description="Semantic analysis of Assurance 2.0 cases.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="write the five .lp files next to the case")
    p.add_argument("case_path")

    p = sub.add_parser("check", help="run semantic checks")
    p.add_argument("--rules", dest="rules_path")
    p.add_argument("--check", dest="check_names", action="append", default=[], metavar="NAME",
                   help="one of: " + ", ".join(CHECK_NAMES) + " (repeatable; default all)")
    p.add_argument("--html", dest="html_path")
    p.add_argument("case_path")

    p = sub.add_parser("query", help="solve a query against the translated case")
    p.add_argument("--max-answers", type=int, default=10)
    p.add_argument("--html", dest="html_path")
    p.add_argument("case_path")
    p.add_argument("query_text")
    return ap


COMMANDS = {"export": cmd_export, "check": cmd_check, "query": cmd_query}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    cfg = CliConfig(**vars(ns))
    try:
        return COMMANDS[cfg.command](cfg)
    except (CaseError, CheckError, ParseError, SafetyError, TranslationError, EngineError, OSError) as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

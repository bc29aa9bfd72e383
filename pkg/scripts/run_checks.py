"""Run every shipped fixture through all applicable checks and print a one-line summary each.

    python3 scripts/run_checks.py [fixtures_dir]
"""

from __future__ import annotations

import sys
from pathlib import Path

from caseforge.case_model import load_case_file
from caseforge.checks import CHECK_NAMES, RULE_DRIVEN, load_rules_file, run_checks

ROOT = Path(__file__).resolve().parent.parent

# case fixture -> rule file stem (None: structural checks only)
PAIRS = {
    "minimal": None,
    "safedriver": None,
    "safedriver_defeated": None,
    "arducopter": "arducopter",
    "arducopter_defeated": "arducopter",
    "consistency": "consistency",
    "harmony": "harmony",
    "harmony_disjoint": "harmony",
}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    fixtures = Path(argv[0]) if argv else ROOT / "fixtures"
    for name, rules_name in PAIRS.items():
        case = load_case_file(fixtures / f"{name}.case.json")
        rules = load_rules_file(fixtures / f"{rules_name}.rules") if rules_name else None
        names = [n for n in CHECK_NAMES if rules is not None or n not in RULE_DRIVEN]
        verdicts = run_checks(case, rules, names)
        failed = [v.check for v in verdicts if not v.passed]
        summary = "all pass" if not failed else "FAIL " + ", ".join(failed)
        print(f"{name:22s} {len(verdicts)} verdicts: {summary}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

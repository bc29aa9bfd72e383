"""Plain-text and static HTML rendering of verdicts and justification trees."""

from __future__ import annotations

import html
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .checks import Verdict
from .engine import FAILED, NAF_FAILS, NAF_HOLDS, PROVED, JustificationTree

MARKS = {PROVED: "✓", NAF_HOLDS: "✓", FAILED: "✗", NAF_FAILS: "✗"}


@dataclass(frozen=True)
class Report:
    title: str
    verdicts: Tuple[Verdict, ...] = ()
    trees: Tuple[JustificationTree, ...] = ()
    case_id: Optional[str] = None
    timestamp: Optional[str] = None

    @classmethod
    def from_verdicts(cls, title: str, verdicts: Sequence[Verdict], case_id: Optional[str] = None, timestamp=None):
        trees = []
        for v in verdicts:
            for t in v.justifications:
                if t not in trees:
                    trees.append(t)
        return cls(title, tuple(verdicts), tuple(trees), case_id, timestamp)


def node_label(t: JustificationTree) -> str:
    label = f"{MARKS[t.verdict]} {t.literal}"
    if t.reason:
        label += f"  ({t.reason})"
    return label


def header_lines(r: Report) -> List[str]:
    """Title line, then one line per verdict and one indented line per reason."""
    title = r.title
    if r.case_id:
        title += f" [{r.case_id}]"
    if r.timestamp:
        title += f" @ {r.timestamp}"
    lines = [title]
    for v in r.verdicts:
        lines.append(f"{v.status.upper()} {v.check}")
        # one line per reason, whatever it contains
        lines.extend("    - " + " ".join(reason.splitlines()) for reason in v.reasons)
    return lines


def _tree_lines(t: JustificationTree, depth: int, out: List[str]):
    # iterative, trees can be deep
    stack = [(t, depth)]
    while stack:
        node, d = stack.pop()
        out.append("  " * d + node_label(node))
        stack.extend((c, d + 1) for c in reversed(node.children))


def render_text(r: Report) -> str:
    lines = header_lines(r)
    for t in r.trees:
        _tree_lines(t, 0, lines)
    return "".join(line + "\n" for line in lines)


_STYLE = """
body { font-family: sans-serif; margin: 2em; }
ul { list-style: none; padding-left: 1.2em; }
summary { cursor: pointer; }
.pass { color: #1a7f37; } .fail { color: #cf222e; }
.lit { font-family: monospace; }
"""


def _html_tree(t: JustificationTree) -> str:
    label = f'<span class="lit">{html.escape(node_label(t))}</span>'
    if not t.children:
        return f"<li>{label}</li>"
    kids = "".join(_html_tree(c) for c in t.children)
    return f"<li><details open><summary>{label}</summary><ul>{kids}</ul></details></li>"


def render_html(r: Report) -> str:
    """One self-contained page; trees collapse with native ``<details>`` elements."""
    head = header_lines(r)
    parts = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        '<head><meta charset="utf-8">',
        f"<title>{html.escape(head[0])}</title>",
        f"<style>{_STYLE}</style>",
        "</head>",
        "<body>",
        f"<h1>{html.escape(head[0])}</h1>",
    ]
    if r.verdicts:
        parts.append("<ul>")
        for v in r.verdicts:
            reasons = "".join(f"<li>{html.escape(x)}</li>" for x in v.reasons)
            reasons = f"<ul>{reasons}</ul>" if reasons else ""
            parts.append(f'<li class="{v.status}">{html.escape(v.status.upper())} {html.escape(v.check)}{reasons}</li>')
        parts.append("</ul>")
    for t in r.trees:
        parts.append(f"<ul>{_html_tree(t)}</ul>")
    parts += ["</body>", "</html>"]
    return "\n".join(parts) + "\n"

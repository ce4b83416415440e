"""Best-effort LaTeX to Markdown conversion with a fixed rule table.

Rules: sectioning commands become #-headers, \\textbf/\\emph become **/*,
itemize/enumerate become list markers, math environments are passed through
as-is inside code fences, \\cite/\\ref become bracketed keys, and comments
are stripped. Unknown commands are left verbatim. The converter is
idempotent on its own output: fenced regions are never reprocessed and every
rewrite removes the syntax that triggered it.
"""

from __future__ import annotations

import re

_MATH_ENVS = ("equation", "align", "gather", "displaymath", "eqnarray", "multline", "math")
_MATH_ENV_RE = re.compile(
    r"\\begin\{(" + "|".join(_MATH_ENVS) + r")(\*?)\}.*?\\end\{\1\2\}",
    re.DOTALL,
)
_BRACKET_MATH_RE = re.compile(r"\\\[.*?\\\]", re.DOTALL)
# Whole-line comments take their newline with them (no blank line left
# behind); inline comments also eat the blanks before the %.
_FULL_LINE_COMMENT_RE = re.compile(r"(?m)^[ \t]*%[^\n]*\n?")
_COMMENT_RE = re.compile(r"[ \t]*(?<!\\)%[^\n]*")
_LIST_BEGIN_RE = re.compile(r"^\s*\\begin\{(itemize|enumerate)\}\s*$")
_LIST_END_RE = re.compile(r"^\s*\\end\{(itemize|enumerate)\}\s*$")
_ITEM_RE = re.compile(r"^(\s*)\\item(?:\[[^\]]*\])?\s*(.*)$")

_HEADERS = (
    ("chapter", "#"),
    ("section", "#"),
    ("subsection", "##"),
    ("subsubsection", "###"),
    ("paragraph", "####"),
)
_REF_COMMANDS = ("cite", "citep", "citet", "ref", "eqref")


def _split_fenced(text: str) -> list[tuple[str, bool]]:
    """Split into (segment, is_fenced) parts; fences are ```-prefixed lines."""
    segments: list[tuple[str, bool]] = []
    lines = text.splitlines(keepends=True)
    buf: list[str] = []
    fenced = False
    for line in lines:
        if line.lstrip().startswith("```"):
            if not fenced:
                if buf:
                    segments.append(("".join(buf), False))
                buf = [line]
                fenced = True
            else:
                buf.append(line)
                segments.append(("".join(buf), True))
                buf = []
                fenced = False
        else:
            buf.append(line)
    if buf:
        segments.append(("".join(buf), fenced))
    return segments


def _fence_math(text: str) -> str:
    def fence(m: re.Match) -> str:
        return f"```math\n{m.group(0)}\n```"

    text = _MATH_ENV_RE.sub(fence, text)
    return _BRACKET_MATH_RE.sub(fence, text)


def _replace_braced(text: str, command: str, render) -> str:
    """Replace every \\command{...} with render(inner), brace-aware."""
    needle = "\\" + command + "{"
    out: list[str] = []
    i = 0
    while True:
        j = text.find(needle, i)
        if j == -1:
            out.append(text[i:])
            return "".join(out)
        out.append(text[i:j])
        k = j + len(needle)
        depth = 1
        while k < len(text) and depth:
            c = text[k]
            if c == "\\" and k + 1 < len(text):
                k += 2
                continue
            if c == "{":
                depth += 1
            elif c == "}":
                depth -= 1
            k += 1
        if depth:
            # Unbalanced braces: leave the rest verbatim.
            out.append(text[j:])
            return "".join(out)
        out.append(render(text[j + len(needle) : k - 1]))
        i = k


def _apply_inline(text: str) -> str:
    for command, left, right in (("textbf", "**", "**"), ("emph", "*", "*"), ("textit", "*", "*")):
        text = _replace_braced(text, command, lambda inner, l=left, r=right: f"{l}{_apply_inline(inner)}{r}")
    return text


def _convert_lists(text: str) -> str:
    out: list[str] = []
    stack: list[tuple[str, int]] = []  # (env kind, item counter)
    for line in text.splitlines():
        m = _LIST_BEGIN_RE.match(line)
        if m:
            stack.append((m.group(1), 0))
            continue
        if _LIST_END_RE.match(line):
            if stack:
                stack.pop()
                continue
        m = _ITEM_RE.match(line)
        if m:
            indent = "  " * max(len(stack) - 1, 0)
            if stack and stack[-1][0] == "enumerate":
                kind, counter = stack[-1]
                counter += 1
                stack[-1] = (kind, counter)
                marker = f"{counter}."
            else:
                marker = "-"
            out.append(f"{indent}{marker} {m.group(2)}")
            continue
        out.append(line)
    converted = "\n".join(out)
    if text.endswith("\n") and not converted.endswith("\n"):
        converted += "\n"
    return converted


def _convert_body(text: str) -> str:
    text = _convert_lists(text)
    text = _apply_inline(text)
    for command, marker in _HEADERS:
        for name in (command + "*", command):
            text = _replace_braced(text, name, lambda inner, m=marker: f"{m} {inner}")
    for command in _REF_COMMANDS:
        text = _replace_braced(text, command, lambda inner: f"[{inner}]")
    return text


def latex_to_markdown(text: str) -> str:
    """Convert LaTeX markup to Markdown; non-LaTeX text passes through."""
    # First pass strips comments and fences math; second pass rewrites the
    # remaining unfenced body. Fenced segments are never touched, which is
    # what makes repeat application a no-op.
    parts: list[str] = []
    for segment, fenced in _split_fenced(text):
        if fenced:
            parts.append(segment)
        else:
            segment = _FULL_LINE_COMMENT_RE.sub("", segment)
            parts.append(_fence_math(_COMMENT_RE.sub("", segment)))
    intermediate = "".join(parts)

    parts = []
    for segment, fenced in _split_fenced(intermediate):
        parts.append(segment if fenced else _convert_body(segment))
    return "".join(parts)

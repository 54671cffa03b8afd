"""
Recover a JSON object from raw model output: reasoning tags and code fences
are dropped, then the first balanced top-level object is decoded.
"""

from typing import Any, Optional
import json
import re

THINK_RE = re.compile(r"<think>.*?</think>", re.DOTALL | re.IGNORECASE)
UNCLOSED_THINK_RE = re.compile(r"^.*?</think>", re.DOTALL | re.IGNORECASE)
FENCE_RE = re.compile(r"```[a-zA-Z]*\n?|\n?```")


def clean_output(text: str) -> str:
    if not text:
        return ""
    text = THINK_RE.sub("", text)
    # a stray closing tag: everything before it was reasoning
    text = UNCLOSED_THINK_RE.sub("", text)
    return FENCE_RE.sub("", text).strip()


def balanced_objects(text: str):
    """Yield every top-level `{...}` span, left to right, skipping braces inside strings."""
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for i, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"' and depth > 0:
            in_string = True
        elif ch == "{":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "}" and depth > 0:
            depth -= 1
            if depth == 0:
                yield text[start: i + 1]


def extract_json(text: str) -> Optional[Any]:
    """First decodable JSON object in `text`, or None."""
    text = clean_output(text)
    if not text:
        return None
    try:
        value = json.loads(text)
        if isinstance(value, dict):
            return value
    except json.JSONDecodeError:
        pass
    for candidate in balanced_objects(text):
        try:
            return json.loads(candidate)
        except json.JSONDecodeError:
            continue
    return None

"""Reading and writing the JSON and DOT artifacts.

Output is byte-stable: documents are built with deterministic ordering and
dumped with a fixed indent and a trailing newline.
"""

import json
import os

from ltlcompose.errors import PlanError


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def write_json(doc, directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(dumps(doc))
    return path


def write_lines(lines, directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.writelines(lines)
    return path


def read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise PlanError(f"invalid document {os.path.basename(path)}: {e.msg} (line {e.lineno})") from e

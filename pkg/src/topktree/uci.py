"""Access to the two UCI datasets used by the accuracy experiments.

``tic-tac-toe`` is fully determined by the rules of the game (every distinct
end-of-game board with x moving first, labeled by whether x won), so it is
regenerated here. ``car`` has no such closed form; it is read from a local
copy of the UCI ``car.data`` file.
"""
from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .dataset import CATEGORICAL, LABEL, load_csv

TTT_COLUMNS = [
    "top-left", "top-middle", "top-right",
    "middle-left", "middle-middle", "middle-right",
    "bottom-left", "bottom-middle", "bottom-right",
]
CAR_COLUMNS = ["buying", "maint", "doors", "persons", "lug_boot", "safety"]

_LINES = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6)]


def _winner(board):
    for a, b, c in _LINES:
        if board[a] != "b" and board[a] == board[b] == board[c]:
            return board[a]
    return None


def tic_tac_toe_boards() -> list[tuple[tuple[str, ...], str]]:
    """All distinct terminal boards reachable with x moving first, sorted."""
    terminal = set()
    seen = set()
    stack = [(("b",) * 9, "x")]
    while stack:
        board, player = stack.pop()
        if board in seen:
            continue
        seen.add(board)
        if _winner(board) or "b" not in board:
            terminal.add(board)
            continue
        nxt = "o" if player == "x" else "x"
        for i, cell in enumerate(board):
            if cell == "b":
                stack.append((board[:i] + (player,) + board[i + 1 :], nxt))
    return [(b, "positive" if _winner(b) == "x" else "negative") for b in sorted(terminal)]


def write_tic_tac_toe(path) -> dict:
    """Write the raw tic-tac-toe CSV (with header) and return its schema."""
    lines = [",".join(TTT_COLUMNS + ["class"])]
    lines += [",".join(board) + f",{label}" for board, label in tic_tac_toe_boards()]
    Path(path).write_text("\n".join(lines) + "\n")
    schema = {c: CATEGORICAL for c in TTT_COLUMNS}
    schema["class"] = LABEL
    return schema


def default_data_dir() -> Path:
    return Path(os.environ.get("TOPKTREE_DATA", Path(__file__).resolve().parents[2] / "data"))


def find_car(data_dir=None) -> Path | None:
    data_dir = Path(data_dir) if data_dir else default_data_dir()
    for name in ("car.data", "car.csv"):
        if (data_dir / name).exists():
            return data_dir / name
    return None


def load_car(path):
    """Read UCI ``car.data`` (no header) or a CSV with the same columns plus a header."""
    text = Path(path).read_text().strip().splitlines()
    header = CAR_COLUMNS + ["class"]
    if text and text[0].split(",")[0].strip() == "buying":
        text = text[1:]
    schema = {c: CATEGORICAL for c in CAR_COLUMNS}
    schema["class"] = LABEL
    with tempfile.TemporaryDirectory() as tmpdir:
        tmp = Path(tmpdir) / "car.csv"
        tmp.write_text("\n".join([",".join(header)] + text) + "\n")
        return load_csv(tmp, schema)


def load_tic_tac_toe(workdir):
    path = Path(workdir) / "tic-tac-toe.csv"
    schema = write_tic_tac_toe(path)
    (Path(workdir) / "tic-tac-toe.schema.json").write_text(json.dumps(schema, indent=2))
    return load_csv(path, schema)

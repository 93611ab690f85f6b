"""Shared helpers for the experiment scripts: config flags and result output."""
from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path


def parse_config(cls, description: str):
    """Build an argparse parser from a dataclass's fields and return a filled instance."""
    ap = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if f.type in ("bool", bool):
            ap.add_argument(flag, action="store_true", default=f.default)
        else:
            kind = {"int": int, "float": float, "str": str}.get(str(f.type), str)
            ap.add_argument(flag, type=kind, default=f.default)
    return cls(**vars(ap.parse_args()))


def save(result: dict, out: str | None):
    if not out:
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(result, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path}")

"""Dataclass configs exposed as command-line flags."""
from __future__ import annotations

import argparse
import dataclasses
import json
from pathlib import Path


def parse_config(cls, description: str):
    parser = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        default = f.default
        kind = type(default)
        flag = "--" + f.name.replace("_", "-")
        if kind is bool:
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=default)
        else:
            parser.add_argument(flag, type=kind, default=default)
    return cls(**vars(parser.parse_args()))


def write_json(path: str, cfg, rows) -> None:
    if not path:
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump({"config": dataclasses.asdict(cfg), "rows": rows}, fh, indent=2, sort_keys=True)
        fh.write("\n")

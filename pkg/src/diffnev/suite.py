"""The bundled experiment suite: every shipped config through the commands that use it."""
from __future__ import annotations

import hashlib
from importlib import resources
from pathlib import Path

from .cli import main

SUITE = (
    ("catalog", "p_plus_exp"),
    ("nev", "exp"),
    ("nev", "sn_values"),
    ("pairs", "sn"),
    ("pairs", "p_plus_exp"),
    ("verify", "exp"),
    ("verify", "sn"),
    ("verify", "p_plus_exp"),
    ("defects", "sn_values"),
    ("defects", "exp_exp"),
    ("share", "sn_share"),
    ("confine", "confine"),
)


def config_path(name: str) -> Path:
    return Path(str(resources.files("diffnev").joinpath("configs", f"{name}.json")))


def run_suite(root, entries=SUITE) -> dict:
    """Run each (command, config) into root/<command>_<config>; returns the exit codes."""
    root = Path(root)
    codes = {}
    for command, name in entries:
        out = root / f"{command}_{name}"
        codes[out.name] = main([command, str(config_path(name)), "--out", str(out)])
    return codes


def tree_digest(root) -> dict:
    """sha256 of every file under root, keyed by relative path."""
    root = Path(root)
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file()}

"""Bundled sample datasets, all produced by the simulator from recorded seeds.

``python3 -m qlcontext.datasets`` rewrites the files in ``qlcontext/data``;
the test suite checks that regeneration is byte-identical.
"""
from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path

from . import io as qio
from .ensemble import preset, sample_counts

# name -> (preset, systems per context, seed)
SAMPLES = {
    "opinion-poll": ("opinion-poll", 2000, 61),
    "grandmother-neurons": ("grandmother-neurons", 50000, 62),
}


def data_dir() -> Path:
    return Path(str(resources.files("qlcontext") / "data"))


def render(name: str) -> dict[str, str]:
    """File name -> contents for one sample dataset."""
    preset_name, n, seed = SAMPLES[name]
    scenario = preset(preset_name)
    table = sample_counts(scenario.spec, n, seed, scenario.space)
    spec = dict(scenario.spec.to_dict(), space=scenario.space.to_dict(), description=scenario.description)
    return {
        f"{name}.spec.json": qio.dumps(spec),
        f"{name}.counts.json": qio.dumps(qio.counts_to_dict(table)),
        f"{name}.counts.csv": qio.counts_to_csv(table),
    }


def write_all(directory: Path | None = None) -> list[Path]:
    directory = Path(directory) if directory is not None else data_dir()
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in SAMPLES:
        for fname, text in render(name).items():
            path = directory / fname
            qio.atomic_write(path, text)
            written.append(path)
    return written


if __name__ == "__main__":
    for p in write_all(Path(sys.argv[1]) if len(sys.argv) > 1 else None):
        print(p)

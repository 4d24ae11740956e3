"""Patch datasets: a JSON manifest, a directory of patch images, a pairs file.

Manifest::

    {"patch_dir": "patches", "pairs_file": "pairs.txt", "patch_size": 64}

Relative paths resolve against the manifest's directory.  Each patch is one
PGM or PNG file whose stem is its identifier; each pairs line reads
``idA idB label`` with label 1 for corresponding and 0 for non-corresponding.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..imageio import ImageFormatError, read_image, write_image

PATCH_SUFFIXES = (".pgm", ".png")


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class PatchPair:
    id_a: str
    id_b: str
    corresponding: bool


@dataclass
class Dataset:
    patches: dict[str, np.ndarray]
    pairs: list[PatchPair]
    patch_size: int | None = None
    root: Path | None = field(default=None, repr=False)

    @property
    def n_pos(self) -> int:
        return sum(p.corresponding for p in self.pairs)

    @property
    def n_neg(self) -> int:
        return len(self.pairs) - self.n_pos


def parse_pairs(lines, source="<pairs>") -> list[PatchPair]:
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[2] not in ("0", "1"):
            raise DatasetError(f"{source}:{lineno}: expected 'idA idB 0|1', got {raw.rstrip()!r}")
        pairs.append(PatchPair(parts[0], parts[1], parts[2] == "1"))
    return pairs


def load_dataset(manifest_path) -> Dataset:
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise FileNotFoundError(f"manifest not found: {manifest_path}")
    try:
        meta = json.loads(manifest_path.read_text())
        patch_dir = manifest_path.parent / meta["patch_dir"]
        pairs_file = manifest_path.parent / meta["pairs_file"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise DatasetError(f"{manifest_path}: malformed manifest ({exc})") from None
    size = meta.get("patch_size")
    if not patch_dir.is_dir():
        raise FileNotFoundError(f"patch directory not found: {patch_dir}")
    if not pairs_file.is_file():
        raise FileNotFoundError(f"pairs file not found: {pairs_file}")

    patches = {}
    for path in sorted(patch_dir.iterdir()):
        if path.suffix.lower() not in PATCH_SUFFIXES:
            continue
        try:
            img = read_image(path)
        except ImageFormatError as exc:
            raise DatasetError(str(exc)) from None
        if img.shape[0] != img.shape[1]:
            raise DatasetError(f"{path}: patch is {img.shape[0]}x{img.shape[1]}, expected square")
        if size is not None and img.shape[0] != size:
            raise DatasetError(f"{path}: patch is {img.shape[0]} pixels wide, manifest says {size}")
        if path.stem in patches:
            raise DatasetError(f"{path}: duplicate patch id {path.stem!r}")
        patches[path.stem] = img

    with pairs_file.open() as fh:
        pairs = parse_pairs(fh, str(pairs_file))
    for p in pairs:
        for pid in (p.id_a, p.id_b):
            if pid not in patches:
                raise DatasetError(f"{pairs_file}: unknown patch id {pid!r}")
    return Dataset(patches, pairs, size, manifest_path.parent)


def save_dataset(dataset: Dataset, directory, fmt: str = "pgm") -> Path:
    """Write patches, pairs file and manifest; returns the manifest path."""
    directory = Path(directory)
    patch_dir = directory / "patches"
    patch_dir.mkdir(parents=True, exist_ok=True)
    for pid, img in dataset.patches.items():
        write_image(patch_dir / f"{pid}.{fmt}", img)
    lines = [f"{p.id_a} {p.id_b} {int(p.corresponding)}\n" for p in dataset.pairs]
    (directory / "pairs.txt").write_text("".join(lines))
    size = dataset.patch_size
    if size is None and dataset.patches:
        size = next(iter(dataset.patches.values())).shape[0]
    manifest = {"patch_dir": "patches", "pairs_file": "pairs.txt", "patch_size": size}
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path

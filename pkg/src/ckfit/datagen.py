"""Benchmark datasets, noise injection and CSV point-cloud I/O.

Samples are equally spaced over the closed interval. Gaussian noise comes
from numpy's legacy ``RandomState(seed).normal`` (Mersenne Twister with the
polar Box-Muller transform), drawn once for all ``n`` samples in order.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ParseError, UsageError
from .ppmodel import DomainTransform, SampleSet


def _sin(x):
    return np.sin(x)


def _chirp(x):
    return np.sin(x ** 2 * 4 * np.pi)


GENERATORS = {"sin(x)": _sin, "sin(x^2*4pi)": _chirp}


@dataclass(frozen=True)
class DatasetSpec:
    id: str
    generator: str
    interval: tuple
    n: int
    m: int
    noise_scale: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise UsageError(f"unknown generator {self.generator!r}")
        if self.n < 2:
            raise UsageError("a dataset needs at least 2 samples")
        if self.m < 1:
            raise UsageError("segment count must be >= 1")
        if self.noise_scale < 0:
            raise UsageError("noise scale must be >= 0")
        a, b = self.interval
        if not a < b:
            raise UsageError("interval must satisfy a < b")
        object.__setattr__(self, "interval", (float(a), float(b)))

    def with_noise(self, scale: float, seed: int = 0) -> "DatasetSpec":
        return DatasetSpec(self.id, self.generator, self.interval, self.n, self.m, scale, seed)

    def to_dict(self):
        return {"id": self.id, "generator": self.generator, "interval": list(self.interval),
                "n": self.n, "m": self.m, "noise_scale": self.noise_scale, "rng_seed": self.rng_seed}


PRESETS = {
    "A": DatasetSpec("A", "sin(x)", (0.0, np.pi / 2), 50, 2),
    "B": DatasetSpec("B", "sin(x)", (0.0, 2 * np.pi), 100, 2),
    "C": DatasetSpec("C", "sin(x^2*4pi)", (0.0, 1.0), 100, 3),
}


def preset(name: str, noise_scale: float = 0.0, seed: int = 0) -> DatasetSpec:
    try:
        spec = PRESETS[name.upper()]
    except KeyError:
        raise UsageError(f"unknown dataset {name!r}; choose from {', '.join(PRESETS)}") from None
    return spec.with_noise(noise_scale, seed)


def sample(spec: DatasetSpec) -> SampleSet:
    """Raw samples in original x units (identity transform)."""
    a, b = spec.interval
    x = np.linspace(a, b, spec.n)
    y = GENERATORS[spec.generator](x)
    if spec.noise_scale > 0:
        y = y + np.random.RandomState(spec.rng_seed).normal(scale=spec.noise_scale, size=spec.n)
    return SampleSet(x, y)


def generate(spec: DatasetSpec) -> SampleSet:
    """Samples rescaled so each of the ``spec.m`` segments spans width 2."""
    return sample(spec).rescaled(spec.m)


def read_csv(path) -> SampleSet:
    """Read an ``x,y`` CSV into an unscaled :class:`SampleSet`."""
    xs, ys = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().lower() for h in header] != ["x", "y"]:
            raise ParseError("expected header 'x,y'", line=1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise ParseError(f"expected 2 columns, got {len(row)}", line=line)
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise ParseError(f"non-numeric value in {row!r}", line=line) from None
            if xs and not x > xs[-1]:
                raise UsageError(f"line {line}: x values must be strictly increasing")
            xs.append(x)
            ys.append(y)
    if not xs:
        raise ParseError("no samples found")
    return SampleSet(np.array(xs), np.array(ys))


def write_csv(data: SampleSet, path, original_units: bool = True):
    """Write samples as ``x,y`` with round-trip (17 significant digit) precision."""
    xs = data.original_xs if original_units else data.xs
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("x,y\n")
        for x, y in zip(xs, data.ys):
            fh.write(f"{float(x)!r},{float(y)!r}\n")


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def transform_for(data: SampleSet, m: int) -> DomainTransform:
    return data.rescaled(m).transform

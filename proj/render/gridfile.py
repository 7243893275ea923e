"""Reader for the grid files written by exciton2des.

The plotting front end is not part of this repository; this module only
fixes the file interface it reads. Header lines are text, the payload that
follows the ``end`` line is little-endian float64 (complex128 interleaves
re, im), row-major with the last axis fastest.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Axis:
    name: str
    unit: str
    values: np.ndarray


@dataclass
class Grid:
    axes: list
    data: np.ndarray
    attrs: dict = field(default_factory=dict)


def read_grid(path):
    with open(path, "rb") as f:
        raw = f.read()
    lines = []
    pos = 0
    while True:
        nl = raw.index(b"\n", pos)
        line = raw[pos:nl].decode("ascii")
        pos = nl + 1
        lines.append(line)
        if line == "end":
            break
    if lines[0] != "exciton2des-grid 1":
        raise ValueError("not an exciton2des grid file")
    dtype = lines[1].split()[1]
    dims = int(lines[2].split()[1])
    axes, i = [], 3
    for _ in range(dims):
        _, name, unit, size = lines[i].split()
        vals = np.array([float(v) for v in lines[i + 1].split()])
        if vals.size != int(size):
            raise ValueError(f"axis {name}: expected {size} values")
        axes.append(Axis(name, unit, vals))
        i += 2
    attrs = {}
    for line in lines[i:-1]:
        _, key, value = line.split(" ", 2)
        attrs[key] = value
    payload = np.frombuffer(raw[pos:], dtype="<f8")
    shape = tuple(a.values.size for a in axes)
    n = int(np.prod(shape)) * (2 if dtype == "complex128" else 1)
    if payload.size != n:
        raise ValueError(f"payload holds {payload.size} values, header says {n}")
    data = payload.view("<c16") if dtype == "complex128" else payload
    return Grid(axes, data.reshape(shape).copy(), attrs)

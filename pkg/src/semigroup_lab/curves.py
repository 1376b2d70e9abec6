"""Sampled norm curves and abscissa grids."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class NormCurve:
    """(abscissa, value) samples plus provenance.

    ``kind`` is ``"continuous"`` for time ``t`` and ``"discrete"`` for step
    counts ``n``. ``argmax`` holds the maximizing mode index (1-based) per
    sample, or -1 where that is meaningless (matrix trajectories).
    """

    kind: str
    abscissa: np.ndarray
    values: np.ndarray
    argmax: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.abscissa = np.asarray(self.abscissa, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.argmax = np.asarray(self.argmax, dtype=np.int64)
        if not (self.abscissa.shape == self.values.shape == self.argmax.shape):
            raise ValueError("abscissa, values and argmax must have equal length")
        if np.any(np.diff(self.abscissa) <= 0):
            raise ValueError("abscissas must be strictly increasing")
        if np.any(self.values < 0) or np.any(np.isnan(self.values)):
            raise ValueError("curve values must be nonnegative numbers")

    def __len__(self):
        return self.abscissa.size

    @property
    def tail_safe(self) -> bool:
        return bool(self.meta.get("tail_safe", True))

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n" if self.kind == "discrete" else "abscissa", "value", "argmax_k"])
        for a, v, k in zip(self.abscissa, self.values, self.argmax):
            w.writerow([_fmt_abscissa(a, self.kind), repr(float(v)), int(k)])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
            Path(path).with_suffix(".json").write_text(self.meta_json())
        return text

    def meta_json(self) -> str:
        meta = dict(self.meta)
        meta["kind"] = self.kind
        meta["samples"] = len(self)
        return json.dumps(meta, sort_keys=True, indent=2, default=_json_default)

    @classmethod
    def from_csv(cls, path, kind: str | None = None) -> "NormCurve":
        path = Path(path)
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{path}: empty curve")
        first = rows[0]
        xkey = "abscissa" if "abscissa" in first else ("n" if "n" in first else "t")
        x = [float(r[xkey]) for r in rows]
        v = [float(r["value"]) for r in rows]
        k = [int(r.get("argmax_k", -1) or -1) for r in rows]
        meta = {}
        sidecar = path.with_suffix(".json")
        if sidecar.exists():
            meta = json.loads(sidecar.read_text())
        kind = kind or meta.pop("kind", None) or ("discrete" if xkey == "n" else "continuous")
        meta.pop("samples", None)
        return cls(kind, x, v, k, meta)


def _fmt_abscissa(a, kind):
    if kind == "discrete":
        return str(int(a))
    return repr(float(a))


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o)}")


def dyadic_grid(lo: float, hi: float, per_octave: int = 1) -> np.ndarray:
    """Points ``lo * 2**(j/per_octave)`` below ``hi``, with ``hi`` appended.

    ``dyadic_grid(1, 1e6)`` has 21 points: 2^0, ..., 2^19 and 1e6.
    """
    if not (0 < lo < hi):
        raise ValueError("need 0 < lo < hi")
    m = int(math.floor(per_octave * math.log2(hi / lo) + 1e-12))
    pts = lo * 2.0 ** (np.arange(m + 1) / per_octave)
    pts = pts[pts < hi * (1 - 1e-12)]
    return np.append(pts, float(hi))


def integer_dyadic_grid(lo: int, hi: int, per_octave: int = 1) -> np.ndarray:
    """Dyadic grid rounded to distinct integers (for step counts)."""
    pts = np.unique(np.rint(dyadic_grid(lo, hi, per_octave)).astype(np.int64))
    return pts


def parse_grid(text: str, integer: bool = False) -> np.ndarray:
    """Parse ``dyadic:lo:hi[:per_octave]``, ``linear:lo:hi:count`` or ``a,b,c``."""
    text = text.strip()
    if text.startswith("dyadic:"):
        parts = text.split(":")[1:]
        lo, hi = float(parts[0]), float(parts[1])
        per = int(parts[2]) if len(parts) > 2 else 1
        if integer:
            return integer_dyadic_grid(int(lo), int(hi), per)
        return dyadic_grid(lo, hi, per)
    if text.startswith("linear:"):
        lo, hi, count = text.split(":")[1:]
        pts = np.linspace(float(lo), float(hi), int(count))
        return np.unique(np.rint(pts).astype(np.int64)) if integer else pts
    vals = [float(v) for v in text.split(",") if v.strip()]
    if integer:
        return np.asarray([int(v) for v in vals], dtype=np.int64)
    return np.asarray(vals)

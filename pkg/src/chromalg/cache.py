"""Content-addressed cache for computed coefficient series.

Files are keyed by the sha256 of their metadata (prime, truncation,
generator scheme, law identity) and store a self-contained canonical-JSON
serialization of a TruncSeries.  A cache hit must be byte-identical to
recomputation; the test suite enforces that.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

from .poly import GF, Generator, PolyRing, QQ
from .presentation import canonical_json, coeff_parse
from .series import TruncSeries

ENV_CACHE_DIR = "CHROMALG_CACHE_DIR"
SCHEMA_SERIES = "chromalg/series/1"


def series_document(series: TruncSeries, meta: dict) -> dict:
    ring = series.ring
    return {
        "schema": SCHEMA_SERIES,
        "meta": meta,
        "prime": ring.field.p,
        "generators": [
            {"name": g.name, "degree": g.degree, "invertible": g.invertible}
            for g in ring.generators
        ],
        **series.to_dict(),
    }


def series_from_document(doc: dict) -> TruncSeries:
    if doc.get("schema") != SCHEMA_SERIES:
        raise ValueError(f"unsupported series schema {doc.get('schema')!r}")
    field = QQ if doc["prime"] == 0 else GF(doc["prime"])
    ring = PolyRing(field, [
        Generator(g["name"], g["degree"], bool(g.get("invertible", False)))
        for g in doc["generators"]
    ])
    coeffs = {}
    for key, items in doc["coeffs"].items():
        exp = tuple(int(x) for x in key.split(","))
        poly = ring.zero()
        for item in items:
            poly = poly + ring.monomial(item["e"], coeff_parse(field, item["c"]))
        coeffs[exp] = poly
    return TruncSeries(ring, doc["nvars"], doc["order"], coeffs)


class SeriesCache:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(meta: dict) -> str:
        return hashlib.sha256(canonical_json(meta).encode()).hexdigest()

    def path(self, meta: dict) -> Path:
        return self.root / f"{self.key(meta)}.json"

    def load(self, meta: dict) -> TruncSeries | None:
        path = self.path(meta)
        if not path.exists():
            return None
        doc = json.loads(path.read_text())
        return series_from_document(doc)

    def store(self, meta: dict, series: TruncSeries) -> str:
        text = canonical_json(series_document(series, meta))
        path = self.path(meta)
        path.write_text(text)
        return text

    def get_or_compute(self, meta: dict, compute) -> tuple[TruncSeries, bool]:
        """Returns (series, hit).  `compute` runs only on a miss."""
        cached = self.load(meta)
        if cached is not None:
            return cached, True
        series = compute()
        self.store(meta, series)
        return series, False


def cache_from_env() -> SeriesCache | None:
    root = os.environ.get(ENV_CACHE_DIR)
    return SeriesCache(root) if root else None

"""OutputDocument: one machine-readable result per command invocation.

CSV output is the table with a header row, preceded by ``# key: value``
metadata comment lines. JSON output is a single object holding metadata and
the payload. Floats are written with 17 significant digits in CSV and as
shortest round-trip reprs in JSON, so both formats carry identical values.
"""

import json
import sys
from dataclasses import dataclass, field
from datetime import UTC, datetime
from typing import Any

import pandas as pd

from yamabe import __version__
from yamabe.tables import records

FORMATS = ('csv', 'json')
FLOAT_FORMAT = '%.17g'


def build_metadata(argv: list[str] | None = None, rng_seed: int | None = None, **extra: Any) -> dict[str, Any]:
    metadata = {
        'tool': 'yamabe',
        'version': __version__,
        'argv': list(sys.argv[1:] if argv is None else argv),
        'rng_seed': rng_seed,
        'timestamp': datetime.now(UTC).isoformat(timespec='seconds'),
    }
    metadata.update(extra)
    return metadata


@dataclass
class OutputDocument:
    """A table payload (``table``) or structured records (``payload``) plus metadata."""

    metadata: dict[str, Any]
    table: pd.DataFrame | None = None
    payload: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        document = {'metadata': self.metadata}
        if self.table is not None:
            document['rows'] = records(self.table)
        document.update(self.payload)
        return json.dumps(document, indent=2, allow_nan=False, default=_jsonable)

    def to_csv(self) -> str:
        lines = [f"# {key}: {_comment(value)}" for key, value in self.metadata.items()]
        table = self.table if self.table is not None else _flatten(self.payload)
        body = table.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        return '\n'.join(lines) + '\n' + body

    def render(self, fmt: str) -> str:
        if fmt == 'json':
            return self.to_json() + '\n'
        if fmt == 'csv':
            return self.to_csv()
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")

    def write(self, fmt: str, out: str | None = None) -> None:
        text = self.render(fmt)
        if out is None or out == '-':
            sys.stdout.write(text)
            return
        with open(out, 'w', encoding='utf-8', newline='') as f:
            f.write(text)


def _comment(value: Any) -> str:
    if isinstance(value, (list, tuple)):
        return ' '.join(str(v) for v in value)
    return str(value)


def _flatten(payload: dict[str, Any], prefix: str = '') -> pd.DataFrame:
    """Nested records as a two-column key/value table."""
    rows = []

    def walk(value: Any, key: str) -> None:
        if isinstance(value, dict):
            for k, v in value.items():
                walk(v, f"{key}.{k}" if key else str(k))
        elif isinstance(value, (list, tuple)):
            for i, v in enumerate(value):
                walk(v, f"{key}[{i}]")
        else:
            rows.append({'key': key, 'value': value})

    walk(payload, prefix)
    return pd.DataFrame(rows, columns=['key', 'value'])


def _jsonable(value: Any) -> Any:
    if hasattr(value, 'tolist'):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")

"""Search result record shared by every search strategy."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any


@dataclass
class SearchReport:
    """Outcome of one budgeted minimum search.

    wall_time covers the search loop only, not path construction; queries
    counts oracle evaluations including repeats at the same time.
    """

    argmin_t: float
    min_value: float
    queries: int
    wall_time: float
    method: str
    params: dict[str, Any] = field(default_factory=dict)
    seed: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self, **extra: Any) -> str:
        d = self.to_dict()
        d.update(extra)
        return json.dumps(d, indent=2, sort_keys=True)

"""Regenerate docs/openapi.json from the live application."""

import json
from pathlib import Path

from reviewlens.api import create_app
from reviewlens.store import ReviewStore

app = create_app(ReviewStore(":memory:"))
out = Path(__file__).resolve().parents[1] / "docs" / "openapi.json"
out.parent.mkdir(parents=True, exist_ok=True)
out.write_text(json.dumps(app.openapi(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
print(f"wrote {out}")

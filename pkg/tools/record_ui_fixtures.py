#!/usr/bin/env python3
"""Record service responses as frontend test fixtures.

Writes frontend/fixtures/reports.json (50 verification reports) and
frontend/fixtures/revise_age.json (a /api/revise response body).
"""

import json
import os
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from corpus import build_corpus  # noqa: E402
from factforge.demo import run_demo  # noqa: E402
from factforge.pipeline import build_components, verify_passage  # noqa: E402
from factforge.revise import revision_result_to_dict  # noqa: E402


def main() -> None:
    out_dir = ROOT / "frontend" / "fixtures"
    out_dir.mkdir(parents=True, exist_ok=True)

    demo = run_demo()
    reports = [demo.states_report.to_dict(), demo.age_report.to_dict()]

    with tempfile.TemporaryDirectory() as tmp:
        for seed, count in ((7, 30), (11, 18)):
            corpus = build_corpus(Path(tmp) / f"seed{seed}", seed=seed)
            components = build_components(corpus.config)
            for inst in corpus.instances[:count]:
                report = verify_passage(inst.text, corpus.config, components)
                reports.append(report.to_dict())

    assert len(reports) == 50, len(reports)
    (out_dir / "reports.json").write_text(
        json.dumps(reports, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")

    revise_body = {"sentences": [revision_result_to_dict(demo.age_revisions)]}
    (out_dir / "revise_age.json").write_text(
        json.dumps(revise_body, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    print(f"wrote {len(reports)} reports and one revise response to {out_dir}")


if __name__ == "__main__":
    main()

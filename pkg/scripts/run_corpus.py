"""Check every bundled problem, and its encodings under every sound scheme, against its expected status.

Set POLYENC_API to run the checks through a running service instead of in process.
"""

import json
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

import httpx

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from polyenc import config  # noqa: E402
from polyenc.cli import RunConfig, load_problem, run_check  # noqa: E402

API_BASE = os.environ.get("POLYENC_API", "")
ONLY = os.environ.get("CORPUS_ONLY", "")
STEP_LIMIT = int(os.environ.get("CORPUS_STEP_LIMIT", config.STEP_LIMIT))

logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s [%(levelname)s] %(message)s",
)
logger = logging.getLogger("run-corpus")
logging.getLogger("httpx").setLevel(logging.WARNING)
logging.getLogger("polyenc").setLevel(logging.WARNING)


def load_manifest(corpus_dir: Path) -> List[Dict]:
    data = json.loads((corpus_dir / "manifest.json").read_text(encoding="utf-8"))
    return data.get("problems", [])


def sound_schemes() -> List[Dict]:
    from polyenc.pipeline import all_schemes

    return [{"scheme": s.scheme.value, "mono": s.mono} for s in all_schemes() if s.sound]


def check_local(text: str, options: Dict) -> str:
    cfg = RunConfig(command="check", **options)
    return run_check(load_problem(text), cfg).verdict.value


def check_remote(client: httpx.Client, text: str, options: Dict) -> str:
    try:
        resp = client.post(f"{API_BASE}/check", json={"problem": text, **options}, timeout=None)
        resp.raise_for_status()
        return resp.json().get("verdict", "inconclusive")
    except Exception as exc:
        logger.warning("Check request failed: %s", exc)
        return "inconclusive"


def main() -> int:
    corpus_dir = config.CORPUS_DIR
    entries = load_manifest(corpus_dir)
    client: Optional[httpx.Client] = httpx.Client() if API_BASE else None
    rows = []
    try:
        for entry in entries:
            name = entry["file"]
            if ONLY and name != ONLY:
                continue
            text = (corpus_dir / name).read_text(encoding="utf-8")
            runs = [("source", {"expect": entry["expect"]})]
            encoded_expect = entry.get("encoded_expect") or entry["expect"]
            for s in sound_schemes():
                label = ("mono_" if s["mono"] else "") + s["scheme"]
                runs.append((label, {"expect": encoded_expect, **s}))
            if entry.get("erased_expect"):
                runs.append(("e", {"expect": entry["erased_expect"], "scheme": "e"}))
            for label, options in runs:
                options = {"steps": STEP_LIMIT, **options}
                if client is not None:
                    verdict = check_remote(client, text, options)
                else:
                    verdict = check_local(text, options)
                logger.info("%-18s %-10s %-8s %s", name, label, options["expect"], verdict)
                rows.append((name, label, verdict))
    finally:
        if client is not None:
            client.close()
    failed = [r for r in rows if r[2] == "fail"]
    inconclusive = [r for r in rows if r[2] == "inconclusive"]
    logger.info("%d checks: %d failed, %d inconclusive", len(rows), len(failed), len(inconclusive))
    for name, label, _ in failed:
        logger.error("FAILED %s under %s", name, label)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())

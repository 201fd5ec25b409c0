"""Start the polyenc service under uvicorn; with RUN_CORPUS=true also run the corpus checks against it."""

import asyncio
import logging
import os
import sys
from pathlib import Path
from typing import Dict, List, Optional

ROOT = Path(__file__).resolve().parent.parent

HOST = os.environ.get("UVICORN_HOST", "0.0.0.0")
PORT = os.environ.get("UVICORN_PORT", "8000")
LOG_LEVEL = os.environ.get("UVICORN_LOG_LEVEL", "warning")
ACCESS_LOG = os.environ.get("UVICORN_ACCESS_LOG", "false").lower() in ("1", "true", "yes")
RUN_CORPUS = os.environ.get("RUN_CORPUS", "false").lower() in ("1", "true", "yes")
BOOT_SECONDS = float(os.environ.get("SERVICE_BOOT_SECONDS", 1.5))

logging.basicConfig(level=logging.INFO, format="%(asctime)s [%(levelname)s] %(message)s")
logger = logging.getLogger("run-all")


def service_command() -> List[str]:
    cmd = [sys.executable, "-m", "uvicorn", "polyenc.main:app", "--host", HOST, "--port", PORT, "--log-level", LOG_LEVEL]
    if not ACCESS_LOG:
        cmd.append("--no-access-log")
    return cmd


async def spawn(cmd: List[str], env: Optional[Dict[str, str]] = None) -> asyncio.subprocess.Process:
    logger.info("Starting: %s", " ".join(cmd))
    return await asyncio.create_subprocess_exec(*cmd, cwd=str(ROOT), env=env)


async def stop(proc: asyncio.subprocess.Process) -> None:
    if proc.returncode is None:
        proc.terminate()
        await proc.wait()


async def main() -> int:
    service = await spawn(service_command())
    try:
        if not RUN_CORPUS:
            return await service.wait()
        await asyncio.sleep(BOOT_SECONDS)
        env = {**os.environ, "POLYENC_API": f"http://127.0.0.1:{PORT}"}
        checks = await spawn([sys.executable, "scripts/run_corpus.py"], env)
        code = await checks.wait()
        logger.info("Corpus checks finished with exit code %s", code)
        return code
    finally:
        await stop(service)


if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        pass

import logging
import os
from pathlib import Path
from typing import Optional

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger(__name__)

DEFAULT_SEARCH_BUDGET = 5000
DEFAULT_LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s — %(message)s"

BUNDLED_TRANSCRIPT_DIR = Path(__file__).resolve().parent / "data" / "transcripts"


def log_level(default: str = DEFAULT_LOG_LEVEL) -> str:
    level = os.getenv("SRGSWITCH_LOG_LEVEL", default).upper()
    if not isinstance(logging.getLevelName(level), int):
        return default
    return level


def configure_logging(default: str = DEFAULT_LOG_LEVEL) -> None:
    logging.basicConfig(level=log_level(default), format=LOG_FORMAT)


def search_budget() -> int:
    raw = os.getenv("SRGSWITCH_SEARCH_BUDGET")
    if not raw:
        return DEFAULT_SEARCH_BUDGET
    try:
        budget = int(raw)
    except ValueError:
        logger.warning(f"config: ignoring non-integer SRGSWITCH_SEARCH_BUDGET={raw!r}")
        return DEFAULT_SEARCH_BUDGET
    return max(1, budget)


def transcript_dirs() -> list[Path]:
    """Directories searched for transcripts given by bare name, in order."""
    dirs: list[Path] = []
    extra = os.getenv("SRGSWITCH_TRANSCRIPT_DIR")
    if extra:
        dirs.append(Path(extra))
    dirs.append(BUNDLED_TRANSCRIPT_DIR)
    return dirs


def thread_cap() -> Optional[int]:
    raw = os.getenv("SRGSWITCH_THREADS")
    if not raw:
        return None
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"config: ignoring non-integer SRGSWITCH_THREADS={raw!r}")
        return None


def apply_thread_cap() -> Optional[int]:
    """Cap numba's worker pool at SRGSWITCH_THREADS. Returns the count in effect."""
    cap = thread_cap()
    if cap is None:
        return None

    import numba

    available = numba.config.NUMBA_NUM_THREADS
    threads = min(max(cap, 1), available)
    if cap > available:
        logger.warning(
            f"config: SRGSWITCH_THREADS={cap} exceeds the {available} threads numba provides"
        )
    numba.set_num_threads(threads)
    logger.info(f"config: numba worker threads capped at {threads}")
    return threads

"""Runtime configuration read from the environment (and an optional .env file)."""

import logging
import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

DEFAULT_N_TOT = int(os.getenv("INVARIANT_SET_N_TOT", "3"))
DEFAULT_SEED = int(os.getenv("INVARIANT_SET_SEED", "0"))
DEFAULT_SAMPLES = int(os.getenv("INVARIANT_SET_SAMPLES", "100000"))
DEFAULT_WORKERS = int(os.getenv("INVARIANT_SET_WORKERS", "1"))

# Monte-Carlo draws are seeded per chunk, so this also fixes the RNG streams.
SAMPLE_CHUNK_SIZE = int(os.getenv("INVARIANT_SET_CHUNK_SIZE", "10000"))

# Largest N for which co-sequences of length 2^N are materialized.
MATERIALIZE_MAX_N = int(os.getenv("INVARIANT_SET_MATERIALIZE_MAX_N", "16"))

# Sampled cases per check when `verify` cannot be exhaustive (N > 8).
VERIFY_SAMPLES = int(os.getenv("INVARIANT_SET_VERIFY_SAMPLES", "1000"))

LOG_LEVEL = os.getenv("INVARIANT_SET_LOG_LEVEL", "INFO")
LOG_FILE = os.getenv("INVARIANT_SET_LOG_FILE")

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


def configure_logging(level: str = LOG_LEVEL, log_file: Optional[str] = LOG_FILE, verbose: bool = False):
    """Configure root logging for CLI and demo runs (stderr plus optional file)"""
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=logging.DEBUG if verbose else getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )

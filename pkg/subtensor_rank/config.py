"""
Configuration settings for the subtensor-rank toolkit.

These settings are used by the search procedures and the CLI commands.
Logging is configured in the package's __init__.py
"""

import os

from dotenv import load_dotenv

# Load environment variables (this is redundant if __init__.py is imported first,
# but included for safety when importing config directly)
load_dotenv()

# Search settings
DEFAULT_NODE_BUDGET = int(os.environ.get("SUBTENSOR_NODE_BUDGET", 10_000_000))
DEFAULT_ORBIT_BUDGET = int(os.environ.get("SUBTENSOR_ORBIT_BUDGET", 1_000_000))

# Pullback matrix settings
DEFAULT_SIZE_CAP = int(os.environ.get("SUBTENSOR_SIZE_CAP", 100_000_000))

# Counting inequality: integers above this many bits are compared via logs
DEFAULT_EXACT_BIT_BUDGET = int(os.environ.get("SUBTENSOR_EXACT_BIT_BUDGET", 400_000))
LOG_PRECISION_BITS = 256

# Experiment settings
DEFAULT_SEED = int(os.environ.get("SUBTENSOR_SEED", 0))
DEFAULT_WORKERS = int(os.environ.get("SUBTENSOR_WORKERS", 1))
EXHAUSTIVE_THRESHOLD = int(os.environ.get("SUBTENSOR_EXHAUSTIVE_THRESHOLD", 20_000))
RATIONAL_SAMPLE_BOUND = int(os.environ.get("SUBTENSOR_RATIONAL_SAMPLE_BOUND", 9))

# Fields the finite search procedures are tuned for
SEARCH_PRIMES = (2, 3, 5, 7, 11, 13)

LOG_LEVEL = os.environ.get("SUBTENSOR_LOG_LEVEL", "INFO")

"""
Main script to run the subtensor-rank command line.
"""

import sys
from pathlib import Path

# Add the project root to the path
sys.path.append(str(Path(__file__).parent))

from subtensor_rank.cli import main

if __name__ == "__main__":
    sys.exit(main())

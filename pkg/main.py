"""
Main entry point for the KMBQKD command line.
"""
import sys
import os
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

# Set environment variables
os.environ.setdefault('PYTHONPATH', str(project_root))

try:
    from src.interface.cli import cli
    from src.utils.logger import logger
except ImportError as e:
    print(f"Failed to import required modules: {e}", file=sys.stderr)
    print("Please ensure all dependencies are installed.", file=sys.stderr)
    sys.exit(1)


def main():
    """Main application entry point."""
    try:
        cli(prog_name="kmbqkd")
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        sys.exit(130)


if __name__ == "__main__":
    main()

"""
Euler Haar - command-line entry point.

Usage: python main.py <command> [options]   (see ``python main.py --help``)
"""
import sys
from pathlib import Path

# Add the project root to the Python path
if __name__ == "__main__":
    project_root = Path(__file__).parent.absolute()
    if str(project_root) not in sys.path:
        sys.path.insert(0, str(project_root))

from euler_haar.main import main

if __name__ == "__main__":
    main()

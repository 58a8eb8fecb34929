"""
Entry script for the node density estimation toolkit.

Examples:
    python main.py sweep-density --trials 10000 --seed 42 --out results/density
    python main.py sweep-range --lambda 0.01 --grid 20:20:100
    python main.py estimate powers.txt --mode local --m 2 --gamma 2
    python main.py validate all
    python main.py sample kth-nearest --k 1 --lambda 0.5 --m 1 -n 3 --seed 7
"""
import sys

from dos_density.cli import main


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nInterrupted by user", file=sys.stderr)
        sys.exit(130)

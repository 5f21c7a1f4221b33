"""Module entry point so ``python -m slukit`` behaves like the console script."""

from .cli import main

if __name__ == "__main__":
    main()

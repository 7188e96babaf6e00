"""Module entry point: python -m fuzzydb ..."""

from .cli import entry

if __name__ == "__main__":
    entry()

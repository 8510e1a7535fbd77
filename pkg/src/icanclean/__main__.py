"""Allow ``python -m icanclean``."""

from .cli import run

if __name__ == "__main__":
    run()

"""Allow running sepfrag as a module: python -m sepfrag"""

from .cli import main

if __name__ == '__main__':
    main()

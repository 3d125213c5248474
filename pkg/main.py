import os
import sys

script_dir = os.path.dirname(os.path.abspath(__file__))
sys.path.insert(0, script_dir)

from head_automata.cli import main

if __name__ == "__main__":
    sys.exit(main())

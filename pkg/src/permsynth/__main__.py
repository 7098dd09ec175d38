import sys

from permsynth.cli import main

sys.exit(main())

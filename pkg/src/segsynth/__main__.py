import sys

from segsynth.cli import main

sys.exit(main())

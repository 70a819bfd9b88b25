import sys

from polyprof.cli import main

sys.exit(main())

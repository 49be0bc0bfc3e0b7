import sys

from advsort.bench.cli import main

sys.exit(main())

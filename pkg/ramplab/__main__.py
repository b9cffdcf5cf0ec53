import sys

from ramplab.cli import main

sys.exit(main())

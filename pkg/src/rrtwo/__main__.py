import sys

from rrtwo.cli import main

sys.exit(main())

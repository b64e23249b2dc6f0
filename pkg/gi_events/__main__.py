import sys

from gi_events.cli import main

sys.exit(main())

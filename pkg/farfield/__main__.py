import sys

from farfield.app.cli import main

sys.exit(main())

import sys

from stoprule.cli import main

sys.exit(main())

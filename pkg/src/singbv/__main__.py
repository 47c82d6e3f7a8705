import sys

from singbv.cli import main

sys.exit(main())

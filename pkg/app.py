import sys

from conjsig.cli import main

sys.exit(main())

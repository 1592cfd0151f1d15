import sys

from povmred.cli import main

sys.exit(main())

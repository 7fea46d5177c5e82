"""Allow ``python -m manifold_oos``."""

import sys

from manifold_oos.cli import main

sys.exit(main())

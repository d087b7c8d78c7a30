from __future__ import annotations

import sys

from labs.cli import main

sys.exit(main())

"""本地启动入口。

用法:
    python -m apps.redei_mild --help
"""

from __future__ import annotations

import sys

from .cli import main


if __name__ == "__main__":
    sys.exit(main())

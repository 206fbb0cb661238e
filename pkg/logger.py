import logging
import os
import sys

# 配置日志器
logger = logging.getLogger("redei_mild")
logger.setLevel(logging.DEBUG)
formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
fhandler = logging.FileHandler(os.getenv("REDEI_MILD_LOG_FILE", "redei_mild.log"), delay=True)  # 首次写日志时才创建文件
fhandler.setFormatter(formatter)
fhandler.setLevel(logging.INFO)
logger.addHandler(fhandler)

handler = logging.StreamHandler(sys.stderr)
handler.setLevel(logging.WARNING)
sformatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')
handler.setFormatter(sformatter)
logger.addHandler(handler)


def set_console_level(level: int) -> None:
    """调整控制台输出级别（`--verbose` / `--quiet`）。"""
    handler.setLevel(level)

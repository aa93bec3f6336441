# main.py
import logging
import os
import sys

from src.config.settings import DEFAULT_LOG_LEVEL, LOG_ENV_VAR
from src.interface.cli import main as cli_main

# Настройка логирования: уровень из переменной окружения QUADMPC_LOG
level_name = os.environ.get(LOG_ENV_VAR, DEFAULT_LOG_LEVEL).upper()
logging.basicConfig(
    level=getattr(logging, level_name, logging.WARNING),
    format='%(asctime)s - %(levelname)s - %(message)s'
)

logger = logging.getLogger(__name__)


def main() -> int:
    try:
        return cli_main(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Получен сигнал завершения.")
        return 130


if __name__ == "__main__":
    sys.exit(main())

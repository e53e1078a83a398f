import sys
from pareto_cat.core.logger import logger
from pareto_cat.services.cli import main

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("pareto-cat stopped by user.")
        sys.exit(130)

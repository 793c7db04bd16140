import os
import sys

from aws_lambda_powertools.logging import Logger

from conjsig.parameter import parameter

logger = Logger(
    service="conjsig",
    level=os.environ.get("LOG_LEVEL", parameter["log_level"]),
    stream=sys.stderr,
)

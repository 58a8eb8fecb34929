import os
from dotenv import load_dotenv
load_dotenv()


# Space and channel defaults: 1 W transmit power, path-loss exponent 4, plane
DEFAULT_DIMENSION = int(os.getenv('DOS_DIMENSION', 2))
DEFAULT_TRANSMIT_POWER = float(os.getenv('DOS_TRANSMIT_POWER', 1.0))
DEFAULT_CHANNEL_CONSTANT = float(os.getenv('DOS_CHANNEL_CONSTANT', 1.0))
DEFAULT_PATH_LOSS_EXPONENT = float(os.getenv('DOS_PATH_LOSS_EXPONENT', 4.0))

# Sweep defaults
DEFAULT_RANGE = float(os.getenv('DOS_RANGE', 100.0))        # meters
DEFAULT_DENSITY = float(os.getenv('DOS_DENSITY', 0.01))     # nodes/m^m
DEFAULT_DENSITY_GRID = os.getenv('DOS_DENSITY_GRID', '0.002:0.002:0.02')
DEFAULT_RANGE_GRID = os.getenv('DOS_RANGE_GRID', '20:20:100')
DEFAULT_TRIALS = int(os.getenv('DOS_TRIALS', 10000))
DEFAULT_SEED = int(os.getenv('DOS_SEED', 2016))
DEFAULT_WORKERS = int(os.getenv('DOS_WORKERS', 1))
DEFAULT_RANK = int(os.getenv('DOS_RANK', 1))

# Monte Carlo size used by the `validate` suites
DEFAULT_VALIDATION_TRIALS = int(os.getenv('DOS_VALIDATION_TRIALS', 1000000))

LOG_LEVEL = os.getenv('DOS_LOG_LEVEL', 'INFO')
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VALIDATION_FAILED = 3

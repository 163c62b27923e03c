"""
Central configuration module for the Statues inference engine.
All file paths, engine limits and output defaults defined here.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# =============================================
# PROJECT PATHS
# =============================================

# Get project root directory (parent of src/)
PROJECT_ROOT = Path(__file__).parent.parent

# Data directories
DATA_DIR = PROJECT_ROOT / 'data'
MODELS_DIR = DATA_DIR / 'models'
RESULTS_DIR = DATA_DIR / 'results'

# Model files are recognised by this extension
MODEL_EXTENSION = '.prob'

# =============================================
# ENGINE CONFIGURATION
# =============================================

# Upper bound on possible worlds the brute-force oracle may enumerate
ORACLE_WORLD_CAP = int(os.getenv('STATUES_ORACLE_CAP', '10000000'))

# Skip bind/unbind on nodes referenced once (results are identical)
SKIP_BINDING_DEFAULT = os.getenv('STATUES_SKIP_BINDING', 'false').lower() in ('1', 'true', 'yes')

# =============================================
# OUTPUT CONFIGURATION
# =============================================

# Supported result formats for the CLI
OUTPUT_FORMATS = ['fraction', 'float', 'json']

DEFAULT_FORMAT = os.getenv('STATUES_FORMAT', 'fraction')

# Digits after the decimal point in float mode
FLOAT_DIGITS = int(os.getenv('STATUES_FLOAT_DIGITS', '17'))

# Rows wider than this are wrapped in trace tables
TRACE_LINE_WIDTH = int(os.getenv('STATUES_TRACE_WIDTH', '160'))

# =============================================
# EXPORT SETTINGS
# =============================================

# Enable/disable different export formats
EXPORT_SUMMARY_CSV = True       # One row per (query, value)
EXPORT_DETAILED_JSON = True     # Full JSON report with metadata


# =============================================
# UTILITY FUNCTIONS
# =============================================

def validate_config():
    """
    Validate that engine and output settings are usable.

    Raises:
        ValueError: If a setting is out of range
    """
    if DEFAULT_FORMAT not in OUTPUT_FORMATS:
        raise ValueError(f"STATUES_FORMAT must be one of {OUTPUT_FORMATS}, got {DEFAULT_FORMAT!r}")

    if FLOAT_DIGITS < 1:
        raise ValueError(f"STATUES_FLOAT_DIGITS must be >= 1, got {FLOAT_DIGITS}")

    if ORACLE_WORLD_CAP < 1:
        raise ValueError(f"STATUES_ORACLE_CAP must be >= 1, got {ORACLE_WORLD_CAP}")

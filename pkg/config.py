"""
Configuration module for the QP reduction toolkit
Loads environment variables and defines numeric defaults
"""
import logging
import os
from dotenv import load_dotenv

load_dotenv()

# Numeric verification
QPR_DEFAULT_TOL = float(os.getenv('QPR_DEFAULT_TOL', '1e-10'))
QPR_SAMPLE_POINTS = int(os.getenv('QPR_SAMPLE_POINTS', '200'))
QPR_VERIFY_THRESHOLD = float(os.getenv('QPR_VERIFY_THRESHOLD', '1e-6'))
QPR_REL_ERROR_FLOOR = float(os.getenv('QPR_REL_ERROR_FLOOR', '1e-30'))
QPR_ATOL_FACTOR = float(os.getenv('QPR_ATOL_FACTOR', '1e-2'))  # atol = tol * factor
QPR_INTEGRATOR = os.getenv('QPR_INTEGRATOR', 'DOP853')

# Reduction
QPR_DEFAULT_POLICY = os.getenv('QPR_DEFAULT_POLICY', 'completion')

# Reports
REPORT_SCHEMA = 'qpr-report/1'

# HTTP API (empty key disables the header check)
QPR_API_KEY = os.getenv('QPR_API_KEY', '')

# Logging
QPR_LOG_LEVEL = os.getenv('QPR_LOG_LEVEL', 'WARNING')
LOG_FORMAT = '[%(name)s] %(levelname)s %(message)s'


def configure_logging(level: str = None):
    """Send records to stderr so stdout stays a clean report"""
    logging.basicConfig(
        level=getattr(logging, (level or QPR_LOG_LEVEL).upper(), logging.WARNING),
        format=LOG_FORMAT,
        force=True,
    )

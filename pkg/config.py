import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Toolkit configuration from environment variables"""

    # Logging
    LOG_LEVEL = os.getenv('TORIC_LOG_LEVEL', 'WARNING').upper()

    # Database configuration
    DATABASE_URL = os.getenv('TORIC_DATABASE_URL', 'sqlite:///toric_cache.db')
    DATABASE_PATH = DATABASE_URL.replace('sqlite:///', '')
    COHOMOLOGY_CACHE = os.getenv('TORIC_COHOMOLOGY_CACHE', '0') == '1'

    # Worker parallelism
    MAX_JOBS = int(os.getenv('TORIC_JOBS', os.cpu_count() or 1))

    # Twist search for the fibration collection constructor
    TWIST_SEARCH_CAP = int(os.getenv('TORIC_TWIST_CAP', 8))

    # Completeness sampling (random integer directions, each must land in a cone)
    COMPLETENESS_SAMPLES = 20
    SAMPLE_COORDINATE_BOUND = 50
    RANDOM_SEED = int(os.getenv('TORIC_SEED', 1729))

    # Catalog limits
    CATALOG_MAX_PROJECTIVE_DIM = 4
    CATALOG_MAX_HIRZEBRUCH = 5

    # Document formats
    FORMAT_VERSION = 1

    @staticmethod
    def validate():
        """Validate configuration ranges"""
        if Config.MAX_JOBS < 1:
            raise ValueError("TORIC_JOBS must be at least 1")
        if Config.TWIST_SEARCH_CAP < 1:
            raise ValueError("TORIC_TWIST_CAP must be at least 1")
        if Config.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ValueError(f"TORIC_LOG_LEVEL '{Config.LOG_LEVEL}' is not a logging level")
        return True

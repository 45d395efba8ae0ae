"""
Configuration settings for the dispersive lab
"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Base configuration class"""

    # Runtime
    OUTPUT_DIR = os.environ.get('LAB_OUTPUT_DIR') or 'lab_output'
    WORKERS = int(os.environ.get('LAB_WORKERS') or 4)
    SEED = int(os.environ.get('LAB_SEED') or 20240601)

    # Logging
    LOG_LEVEL = os.environ.get('LAB_LOG_LEVEL') or 'INFO'
    LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

    # Default grid (d, N, L)
    GRID_DIMENSION = 1
    GRID_POINTS = 512
    GRID_PERIOD = 64.0
    MAX_DENSE_POINTS = 1024

    # Transform / propagation tolerances
    FBI_TOLERANCE = 1e-3
    FBI_MAX_SPACING = 0.25
    FBI_CHUNK_SLICES = 256
    NORM_DRIFT_LIMIT = 1e-4
    NORM_CONSERVATION = 1e-6
    HERMITIAN_TOLERANCE = 1e-10

    # Hamilton flow
    FLOW_STEP = 1e-3
    FLOW_REL_TOLERANCE = 1e-8
    FLOW_MAX_HALVINGS = 8
    FD_XI_STEP = 1e-4    # relative to the band lambda
    FD_X_STEP = 1e-4     # relative to the x length scale

    # Symbol classes
    CLASS_BUDGET = 10.0
    CLASS_DEFAULT_K = 2
    CLASS_MAX_ORDER = 4
    CLASS_POINTS_PER_STRATUM = 1024
    CLASS_SAMPLE_LIMIT = 200_000
    CONVEXITY_MIN_RATIO = 0.5

    # Estimates
    FIT_TOLERANCE = 0.05
    TIME_SAMPLES = 48
    LADDER_SAMPLES = 32
    MAX_PERIOD = 8192.0

    # Partition
    PARTITION_N_BETA = 2
    PARTITION_CELLS = 1024
    BUDGET_RTOL = 1e-9

    # Paraproducts
    PARAPRODUCT_CUTOFF_LOG2 = 3
    PARAPRODUCT_MIN_FREQUENCY = 1.0


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    LOG_LEVEL = os.environ.get('LAB_LOG_LEVEL') or 'DEBUG'


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False


class TestingConfig(Config):
    """Testing configuration"""
    TESTING = True
    WORKERS = 2
    OUTPUT_DIR = 'test_lab_output'
    LOG_LEVEL = 'WARNING'


# Configuration dictionary
config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': DevelopmentConfig
}

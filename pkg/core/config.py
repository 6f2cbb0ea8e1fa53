import os
from pathlib import Path
from typing import Optional
from pydantic import BaseSettings, Field, validator
from dotenv import load_dotenv
import logging
from functools import lru_cache

# Configure logging
logger = logging.getLogger(__name__)

# Load environment variables from .env file
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(dotenv_path=env_path)

class Settings(BaseSettings):
    PROJECT_NAME: str = "Mean-Field Remote Estimation"
    VERSION: str = "1.0.0"

    # Environment Settings
    ENVIRONMENT: str = Field(env='MFRE_ENVIRONMENT', default='development')

    # Logging Settings
    LOG_LEVEL: str = Field(env='MFRE_LOG_LEVEL', default='INFO')
    LOG_FORMAT: str = Field(env='MFRE_LOG_FORMAT', default='%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    LOG_DIR: Optional[str] = Field(env='MFRE_LOG_DIR', default=None)

    # Solver Settings
    THETA_TOL: float = Field(env='MFRE_THETA_TOL', default=1e-9, gt=0)
    LAMBDA_TOL: float = Field(env='MFRE_LAMBDA_TOL', default=1e-9, gt=0)
    MAX_INNER_ITERS: int = Field(env='MFRE_MAX_INNER_ITERS', default=10_000, ge=1)
    MAX_OUTER_ITERS: int = Field(env='MFRE_MAX_OUTER_ITERS', default=1_000, ge=1)
    LAMBDA_BRACKET_START: float = Field(env='MFRE_LAMBDA_BRACKET_START', default=1.0, gt=0)
    LAMBDA_BRACKET_MAX_DOUBLINGS: int = Field(env='MFRE_LAMBDA_BRACKET_MAX_DOUBLINGS', default=200, ge=1)
    FEASIBILITY_TOL: float = Field(env='MFRE_FEASIBILITY_TOL', default=1e-8, ge=0)

    # Density Settings
    WEIGHT_RENORM_TOL: float = Field(env='MFRE_WEIGHT_RENORM_TOL', default=1e-9, ge=0)
    QMC_LOG2_SAMPLES: int = Field(env='MFRE_QMC_LOG2_SAMPLES', default=16, ge=4, le=24)
    QMC_SEED: int = Field(env='MFRE_QMC_SEED', default=0, ge=0)
    PDF_CHUNK_ELEMENTS: int = Field(env='MFRE_PDF_CHUNK_ELEMENTS', default=4_000_000, ge=1)

    # Simulation / Experiment Settings
    CONFIDENCE_Z: float = Field(env='MFRE_CONFIDENCE_Z', default=1.96, gt=0)
    DEFAULT_BATCHES: int = Field(env='MFRE_DEFAULT_BATCHES', default=50, ge=1)
    WORKERS: int = Field(env='MFRE_WORKERS', default=1, ge=1)

    class Config:
        case_sensitive = True
        env_file = '.env'

    @validator('LOG_LEVEL', pre=True)
    def parse_log_level(cls, v: str) -> str:
        level = str(v).upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown log level: {v}")
        return level

    @property
    def qmc_samples(self) -> int:
        """Number of Sobol points used for d>1 ball integrals"""
        return 2 ** self.QMC_LOG2_SAMPLES

    def validate_settings(self) -> None:
        """Validate critical settings"""
        assert self.THETA_TOL < 1e-3, "THETA_TOL is too loose for saddle-point checks"
        assert self.LAMBDA_TOL < 1e-3, "LAMBDA_TOL is too loose for saddle-point checks"
        assert self.WEIGHT_RENORM_TOL < 1e-6, "WEIGHT_RENORM_TOL would hide malformed mixtures"
        if self.ENVIRONMENT == 'production':
            assert self.LOG_DIR, "Production runs require MFRE_LOG_DIR"

@lru_cache()
def get_settings() -> Settings:
    """Get application settings"""
    settings = Settings()
    if os.getenv('MFRE_VALIDATE_SETTINGS', '').lower() == 'true':
        settings.validate_settings()
    return settings

# Initialize settings
try:
    settings = get_settings()
except Exception as e:
    logger.error(f"Configuration error: {str(e)}")
    raise

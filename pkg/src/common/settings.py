"""
Settings
Environment-backed settings (``.env`` is honoured via python-dotenv)
"""

import os
from typing import Optional

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel

ENV_OUTPUT_DIR = "LATENTGUARD_OUTPUT_DIR"
ENV_LOG_LEVEL = "LATENTGUARD_LOG_LEVEL"
ENV_CREDITCARD_CSV = "LATENTGUARD_CREDITCARD_CSV"


class Settings(BaseModel):
    """Process-level settings read from the environment"""
    output_dir: Optional[str] = None
    log_level: str = "INFO"
    creditcard_csv: Optional[str] = None


def get_settings(dotenv_path: Optional[str] = None) -> Settings:
    """
    Read settings from the environment after loading ``.env``

    Args:
        dotenv_path: Explicit .env file; defaults to searching the working directory

    Returns:
        Settings snapshot
    """
    load_dotenv(dotenv_path=dotenv_path or find_dotenv(usecwd=True), override=False)
    return Settings(
        output_dir=os.getenv(ENV_OUTPUT_DIR) or None,
        log_level=os.getenv(ENV_LOG_LEVEL, "INFO"),
        creditcard_csv=os.getenv(ENV_CREDITCARD_CSV) or None,
    )

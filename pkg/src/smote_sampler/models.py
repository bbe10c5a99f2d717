"""
SMOTE Sampler Models
"""

from pydantic import BaseModel, Field


class SmoteConfig(BaseModel):
    """Neighbor count, number of synthetic rows and the sampling seed"""
    k_neighbors: int = Field(default=5, ge=1)
    n_samples: int = Field(default=50, ge=0)
    seed: int = Field(default=0, ge=0)

    class Config:
        json_schema_extra = {"example": {"k_neighbors": 5, "n_samples": 75, "seed": 42}}

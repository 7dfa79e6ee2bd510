"""
Analytic FL constants.

The learning process itself is not simulated; its behaviour enters only
through these scalars.
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class LearningParams(BaseModel):
    """Smoothness/convexity constants and accuracy targets."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    L: float = Field(100.0, gt=0, description="smoothness constant")
    mu: float = Field(10.0, gt=0, description="strong-convexity constant")
    xi: float = Field(1.0, gt=0, description="aggregation coefficient")
    delta: float = Field(0.005, gt=0, description="local step size")
    local_accuracy: float = Field(0.5, gt=0, lt=1, description="varpi")
    global_accuracy: float = Field(0.01, gt=0, le=1, description="varrho")

    @model_validator(mode="after")
    def _check_assumptions(self) -> "LearningParams":
        if self.L < self.mu:
            raise ValueError(f"L ({self.L}) must be >= mu ({self.mu})")
        if (2.0 - self.L * self.delta) * self.delta * self.mu <= 0:
            raise ValueError(
                f"(2 - L*delta)*delta*mu must be positive; got L={self.L}, delta={self.delta}, mu={self.mu}"
            )
        return self


class GapParams(BaseModel):
    """
    Generalization-gap constants.

    H_pz defaults to c0, which makes Psi vanish at k = 0.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    c0: float = Field(1.0, gt=0, description="[nats]")
    c1: float = Field(1.0, gt=0, description="[1/s]")
    sigma2: float = Field(1.0, ge=0, description="loss variance")
    H_Z: float = Field(1.0, ge=0, description="dataset entropy [bits]")
    H_pz: float = Field(ge=0, description="[nats]")
    m_u: tuple[float, ...] = Field((500.0,), min_length=1, description="samples per user")

    @model_validator(mode="before")
    @classmethod
    def _default_entropy(cls, data):
        if isinstance(data, dict) and data.get("H_pz") is None:
            data = {**data, "H_pz": data.get("c0", 1.0)}
        return data

    @model_validator(mode="after")
    def _check_counts(self) -> "GapParams":
        if any(m <= 0 for m in self.m_u):
            raise ValueError("every m_u entry must be positive")
        return self

    @property
    def m(self) -> float:
        """Total sample count over users."""
        return float(sum(self.m_u))

    def sample_count(self, u: int) -> float:
        """m_u for user u; a single entry applies to every user."""
        if len(self.m_u) == 1:
            return self.m_u[0]
        return self.m_u[u]

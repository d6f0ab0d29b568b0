"""Fixed gas cost table, one entry per payload kind"""

from pydantic import BaseModel, ConfigDict, Field

# `register` is taken by BaseModel
_FIELD_OF_KIND = {"register": "register_gas"}


class CostTable(BaseModel):
    """Gas units charged per payload kind"""

    model_config = ConfigDict(frozen=True, extra="forbid", populate_by_name=True)

    plain: int = Field(default=1, ge=0)
    transfer: int = Field(default=10, ge=0)
    register_gas: int = Field(default=10, ge=0, alias="register")
    withdraw: int = Field(default=10, ge=0)
    reclaim: int = Field(default=10, ge=0)
    assign_tasks: int = Field(default=10, ge=0)
    deliver_tx: int = Field(default=10, ge=0)
    prove_delivery: int = Field(default=10, ge=0)
    submit_timeout: int = Field(default=10, ge=0)
    update_client: int = Field(default=5, ge=0)

    def units(self, kind: str) -> int:
        """Get the gas units for a payload kind"""
        name = _FIELD_OF_KIND.get(kind, kind)
        if name not in type(self).model_fields:
            raise KeyError(f"No gas cost defined for payload kind {kind}")
        return int(getattr(self, name))

    def relay_cost(self, gas_price: int = 1, deliver_price: int = 0) -> int:
        """Gas paid to deliver and prove one task"""
        return self.deliver_tx * (deliver_price or gas_price) + self.prove_delivery * gas_price

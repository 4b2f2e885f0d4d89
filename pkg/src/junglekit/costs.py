"""Token-denominated cost accounting and the compound-vs-monolithic ratio.

All arithmetic is exact: prices are held as integer micro-money per million
tokens and record costs accumulate as integers at 1e-12 money resolution,
so totals are bit-reproducible and order-independent. Rounding (half-even)
happens only when a number is formatted for a report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ContractViolation

MICRO = 10**6
_PICO = 10**12

# One money per million tokens at the monolithic blended rate buys exactly
# the 2.2M-token budget anchor: floor(100 / 45.454545 * 1e6) = 2,200,000.
DEFAULT_MONOLITHIC_BLENDED = Decimal("45.454545")
DEFAULT_RERANKER_PRICE = Decimal("0.05")
RERANKER_MODEL_ID = "reranker"


def to_micro(amount) -> int:
    """Convert a money amount (str, int, float, Decimal) to integer micro-units."""
    if isinstance(amount, float):
        amount = repr(amount)
    dec = Decimal(amount)
    scaled = dec * MICRO
    if scaled != scaled.to_integral_value():
        raise ContractViolation(f"amount {amount!r} is finer than micro-money resolution")
    return int(scaled)


def micro_to_money(micro: int) -> Decimal:
    return Decimal(micro).scaleb(-6)


@dataclass(frozen=True)
class CostRecord:
    model_id: str
    input_tokens: int
    output_tokens: int
    occurred_at: int = 0

    def __post_init__(self) -> None:
        if self.input_tokens < 0 or self.output_tokens < 0:
            raise ContractViolation("token counts must be non-negative")


@dataclass(frozen=True)
class ModelPrice:
    price_in_micro: int
    price_out_micro: int

    def __post_init__(self) -> None:
        if self.price_in_micro < 0 or self.price_out_micro < 0:
            raise ContractViolation("prices must be non-negative")


@dataclass(frozen=True)
class PricingTable:
    """Per-model prices (money per 1M tokens) plus the monolithic blended rate."""

    models: Mapping[str, ModelPrice]
    monolithic_blended_micro: int = to_micro(DEFAULT_MONOLITHIC_BLENDED)

    def __post_init__(self) -> None:
        if self.monolithic_blended_micro < 0:
            raise ContractViolation("monolithic blended price must be non-negative")

    def price_for(self, model_id: str) -> ModelPrice:
        price = self.models.get(model_id)
        if price is None:
            if model_id == RERANKER_MODEL_ID:
                micro = to_micro(DEFAULT_RERANKER_PRICE)
                return ModelPrice(micro, micro)
            raise ContractViolation(f"no price configured for model {model_id!r}")
        return price

    @classmethod
    def build(cls, prices: Mapping[str, tuple], monolithic_blended=DEFAULT_MONOLITHIC_BLENDED):
        models = {
            model_id: ModelPrice(to_micro(pin), to_micro(pout))
            for model_id, (pin, pout) in prices.items()
        }
        return cls(models=models, monolithic_blended_micro=to_micro(monolithic_blended))


@dataclass
class Ledger:
    """Append-only sequence of cost records; totals don't depend on order."""

    records: list[CostRecord] = field(default_factory=list)

    def append(self, record: CostRecord) -> None:
        self.records.append(record)

    def extend(self, records: Iterable[CostRecord]) -> None:
        self.records.extend(records)

    def __len__(self) -> int:
        return len(self.records)


def total_cost_pico(ledger: Ledger, pricing: PricingTable) -> int:
    """Exact ledger total in 1e-12 money units."""
    total = 0
    for rec in ledger.records:
        price = pricing.price_for(rec.model_id)
        total += rec.input_tokens * price.price_in_micro
        total += rec.output_tokens * price.price_out_micro
    return total


def total_cost(ledger: Ledger, pricing: PricingTable) -> Decimal:
    """Ledger total in money, exact to 1e-12."""
    return Decimal(total_cost_pico(ledger, pricing)).scaleb(-12)


def format_money(amount: Decimal, places: int = 6) -> str:
    """Half-even rounding for display; the only place rounding happens."""
    quantum = Decimal(1).scaleb(-places)
    return str(amount.quantize(quantum, rounding=ROUND_HALF_EVEN))


def tokens_for_budget(budget, blended_price) -> int:
    """How many tokens a budget buys at a blended per-million rate."""
    price_micro = to_micro(blended_price)
    if price_micro <= 0:
        raise ContractViolation("blended price must be positive")
    budget_micro = to_micro(budget)
    if budget_micro < 0:
        raise ContractViolation("budget must be non-negative")
    return (budget_micro * 1_000_000) // price_micro


def cost_ratio(compound_ledger: Ledger, pricing: PricingTable, monolithic_tokens: int) -> float:
    """Compound spend divided by the monolithic cost of the same visible volume.

    ``monolithic_tokens`` is the caller-supplied sum over answered queries of
    input tokens plus the winning answer's output tokens; pricing it at the
    blended monolithic rate gives the denominator.
    """
    if not compound_ledger.records:
        raise ContractViolation("compound ledger is empty")
    if monolithic_tokens <= 0:
        raise ContractViolation("monolithic token volume must be positive")
    denominator_pico = monolithic_tokens * pricing.monolithic_blended_micro
    if denominator_pico == 0:
        raise ContractViolation("monolithic cost is zero; ratio undefined")
    numerator_pico = total_cost_pico(compound_ledger, pricing)
    return float(Fraction(numerator_pico, denominator_pico))

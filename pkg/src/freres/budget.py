"""Hierarchical token-budget allocation and context-token accounting.

Given a total visual-token budget, spatial anchors are reserved first
(anchors x raw tokens per anchor), then summary and static tokens; the
remainder funds the temporal-frequency branch, whose retained coefficient
count is the budget quotient capped by both the configured maximum and
the effective trajectory length of a temporal group.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BudgetTooSmall, DivisionDomain, InvalidBudget

__all__ = ["BudgetRequest", "CompressionPlan", "allocate", "account_context", "compression_ratio"]


@dataclass(frozen=True)
class BudgetRequest:
    """Inputs to the allocator; counts only, no tensor data."""

    budget: int  # B, total visual-token budget
    anchors: int  # M
    k_raw: int  # raw tokens kept per anchor
    summary_budget: int  # reserved summary tokens
    static_budget: int  # reserved static tokens
    groups: int  # number of temporal groups
    pool_positions: int  # pooled spatial positions per group
    k_max: int  # coefficient cap
    group_length: int  # effective trajectory length of a group

    def __post_init__(self):
        if self.budget < 1:
            raise InvalidBudget(f"budget must be >= 1, got {self.budget}")
        for name in ("anchors", "k_raw", "summary_budget", "static_budget",
                     "groups", "pool_positions", "k_max", "group_length"):
            if getattr(self, name) < 0:
                raise InvalidBudget(f"{name} must be >= 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class CompressionPlan:
    """Resolved sub-budgets and coefficient count for one encode."""

    request: BudgetRequest
    spatial_budget: int
    freq_budget: int
    k: int

    @property
    def predicted_max_tokens(self) -> int:
        r = self.request
        return (
            self.spatial_budget
            + r.summary_budget
            + r.static_budget
            + r.groups * self.k * r.pool_positions
        )


def allocate(req: BudgetRequest) -> CompressionPlan:
    """Resolve a plan: spatial = M*k_raw, freq = remainder, K = capped quotient.

    Raises BudgetTooSmall when the frequency budget is non-positive or the
    resulting coefficient count would be zero. Leftover frequency budget is
    not redistributed; the coefficient rule is a hard minimum.
    """
    spatial = req.anchors * req.k_raw
    freq = req.budget - spatial - req.summary_budget - req.static_budget
    if freq <= 0:
        raise BudgetTooSmall(
            f"budget {req.budget} leaves no frequency budget after reserving "
            f"{spatial} spatial + {req.summary_budget} summary + {req.static_budget} static"
        )
    per_group = req.groups * req.pool_positions
    quotient = freq // per_group if per_group > 0 else req.k_max
    k = min(req.k_max, req.group_length, quotient)
    if k < 1:
        raise BudgetTooSmall(
            f"frequency budget {freq} cannot fund one coefficient across "
            f"{req.groups} groups x {req.pool_positions} positions "
            f"(k_max={req.k_max}, group_length={req.group_length})"
        )
    return CompressionPlan(request=req, spatial_budget=spatial, freq_budget=freq, k=k)


def account_context(frames: int, tokens_per_frame: int, text_tokens: int) -> int:
    """Total context tokens: frames * tokens_per_frame + text_tokens."""
    if frames < 0 or tokens_per_frame < 0 or text_tokens < 0:
        raise InvalidBudget("counts must be >= 0")
    return frames * tokens_per_frame + text_tokens


def compression_ratio(baseline_tokens: int, compressed_tokens: int) -> float:
    """baseline / compressed; compressed must be nonzero."""
    if compressed_tokens == 0:
        raise DivisionDomain("compressed token count is zero")
    return baseline_tokens / compressed_tokens

"""Small frame-based CNN and the soft-label loss."""

from __future__ import annotations

import torch
import torch.nn as nn
import torch.nn.functional as F


class SmallCNN(nn.Module):
    """Three conv blocks over time-and-polarity-stacked frames.

    Input is (B, T*C, H, W); time bins are treated as channels, which
    is enough for a directional comparison on the toy task.
    """

    def __init__(self, in_channels: int, num_classes: int):
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, 32, 3, padding=1)
        self.conv2 = nn.Conv2d(32, 64, 3, padding=1)
        self.conv3 = nn.Conv2d(64, 64, 3, padding=1)
        self.head = nn.Linear(64, num_classes)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = F.avg_pool2d(x, 2)                 # 48 -> 24 up front, cheap
        x = F.max_pool2d(F.relu(self.conv1(x)), 2)   # 24 -> 12
        x = F.max_pool2d(F.relu(self.conv2(x)), 2)   # 12 -> 6
        x = F.relu(self.conv3(x))
        x = F.adaptive_avg_pool2d(x, 1).flatten(1)
        return self.head(x)


def soft_cross_entropy(logits: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    """Cross-entropy against a distribution; equals nll on one-hot targets."""
    return -(target * F.log_softmax(logits, dim=1)).sum(dim=1).mean()

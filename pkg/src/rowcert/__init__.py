"""Certified completion of unimodular rows over polynomial and Laurent
polynomial rings, with elementary-operation witnesses that an independent
exact-arithmetic checker can replay."""

from __future__ import annotations

__version__ = "0.1.0"

"""Shared fixtures: hand-built reference instances used across the suite."""

import numpy as np
import pytest

from lendmatch import MarketInstance


@pytest.fixture
def two_by_four():
    """2 borrowers x 4 lenders; each side's utilities agree, so the
    optimum matches every lender to its preferred borrower."""
    return MarketInstance(
        capacity=np.array([3.0, 3.0]),
        budget=np.array([3.0, 3.0, 3.0, 3.0]),
        lender_utility=np.array([[0.9, 0.1],
                                 [0.8, 0.2],
                                 [0.1, 0.9],
                                 [0.2, 0.8]]),
        borrower_utility=np.array([[0.9, 0.8, 0.2, 0.1],
                                   [0.1, 0.2, 0.9, 0.8]]),
    )


@pytest.fixture
def infeasible_instance():
    """c=(3,3), q=(2,2,2): no partition of three budget-2 lenders covers
    two capacity-3 borrowers, despite sum(q) = 6 = sum(c)."""
    return MarketInstance(
        capacity=np.array([3.0, 3.0]),
        budget=np.array([2.0, 2.0, 2.0]),
        lender_utility=np.array([[0.6, 0.3],
                                 [0.5, 0.2],
                                 [0.4, 0.7]]),
        borrower_utility=np.array([[0.5, 0.6, 0.7],
                                   [0.3, 0.2, 0.1]]),
    )


@pytest.fixture
def single_pair():
    return MarketInstance(
        capacity=np.array([5.0]),
        budget=np.array([5.0]),
        lender_utility=np.array([[0.7]]),
        borrower_utility=np.array([[0.4]]),
    )

import logging
from itertools import combinations
from typing import Dict, FrozenSet, List, Tuple

import numpy as np

from schemas.guesses import SetSystem
from .exceptions import FamilyTooLargeError, InfeasibleError, UniverseTooLargeError

logger = logging.getLogger(__name__)

FAMILY_LIMIT = 25
UNIVERSE_LIMIT = 25

_UNREACHED = 1 << 20


def _signatures(sys: SetSystem) -> Dict[int, int]:
    """Element -> bit mask of the family members it hits; elements hitting nothing are dropped."""
    signatures: Dict[int, int] = {}
    for bit, member in enumerate(sys.family):
        for element in member:
            signatures[element] = signatures.get(element, 0) | (1 << bit)
    return signatures


def minimal_members(family: Tuple[FrozenSet[int], ...]) -> Tuple[FrozenSet[int], ...]:
    """
    Inclusion-minimal members of a family, duplicates removed, in first-seen order.

    A set hits every member of ``family`` iff it hits every minimal member, so both have the
    same hitting sets.
    """
    distinct = tuple(dict.fromkeys(family))
    return tuple(member for member in distinct if not any(other < member for other in distinct))


def _cover_table(distinct_signatures: List[int], m: int) -> np.ndarray:
    """
    ``cover[R]``: fewest elements whose signatures together hit every member in mask R.

    Forward subset DP over union masks, then a superset-minimum transform.
    """
    size = 1 << m
    masks = np.arange(size, dtype=np.int64)
    dp = np.full(size, _UNREACHED, dtype=np.int32)
    dp[0] = 0
    for signature in distinct_signatures:
        np.minimum.at(dp, masks | signature, dp + 1)

    cover = dp.copy()
    for bit in range(m):
        view = cover.reshape(-1, 2, 1 << bit)
        np.minimum(view[:, 0, :], view[:, 1, :], out=view[:, 0, :])
    return cover


def min_hitting_set(sys: SetSystem, limit: int = FAMILY_LIMIT) -> FrozenSet[int]:
    """
    Minimum-cardinality hitting set by dynamic programming over family masks.

    Among minimum solutions the lexicographically smallest (as a sorted tuple) is returned.

    :param sys: The set system.
    :param limit: Largest family size accepted.
    :return: The hitting set; empty for an empty family.
    :raises FamilyTooLargeError: if the family has more than ``limit`` members.
    :raises InfeasibleError: if some family member is empty.
    """
    m = len(sys.family)
    if m > limit:
        raise FamilyTooLargeError(f"family has {m} members, limit is {limit}")
    for index, member in enumerate(sys.family):
        if not member:
            raise InfeasibleError(f"family member {index} is empty")
    if m == 0:
        return frozenset()

    signatures = _signatures(sys)
    cover = _cover_table(sorted(set(signatures.values())), m)

    remaining = (1 << m) - 1
    chosen = []
    ordered = sorted(signatures.items())
    while remaining:
        need = int(cover[remaining])
        for element, signature in ordered:
            if signature & remaining and int(cover[remaining & ~signature]) == need - 1:
                chosen.append(element)
                remaining &= ~signature
                break
    logger.debug(f"Minimum hitting set of {m} members has size {len(chosen)}")
    return frozenset(chosen)


def enumerate_min_hitting_sets(
    sys: SetSystem,
    limit: int = FAMILY_LIMIT,
    universe_limit: int = UNIVERSE_LIMIT,
) -> List[Tuple[int, ...]]:
    """
    All inclusion-wise minimal hitting sets, sorted by size and then lexicographically.

    Returns ``[()]`` for an empty family and ``[]`` when some member is empty.
    """
    m = len(sys.family)
    if m > limit:
        raise FamilyTooLargeError(f"family has {m} members, limit is {limit}")
    if len(sys.universe) > universe_limit:
        raise UniverseTooLargeError(f"universe has {len(sys.universe)} elements, limit is {universe_limit}")
    if m == 0:
        return [()]
    if any(not member for member in sys.family):
        return []

    signatures = _signatures(sys)
    elements = sorted(signatures)
    full = (1 << m) - 1

    found: List[Tuple[int, ...]] = []
    for size in range(1, len(elements) + 1):
        for candidate in combinations(elements, size):
            chosen = set(candidate)
            if any(set(smaller) <= chosen for smaller in found):
                continue
            hit = 0
            for element in candidate:
                hit |= signatures[element]
            if hit == full:
                found.append(candidate)
    return found

from qcp.histructs.radix import RadixError, RadixTree
from qcp.histructs.skiphash import HashTable, SkipOps, level_of, levels_cap
from qcp.histructs.structures import (
    AuditError,
    AugmentedStructure,
    BasicStructure,
    BichromaticStructure,
    InternalConsistencyError,
    PromiseViolationError,
    StructureError,
)

__all__ = [
    "RadixTree",
    "RadixError",
    "HashTable",
    "SkipOps",
    "level_of",
    "levels_cap",
    "BasicStructure",
    "AugmentedStructure",
    "BichromaticStructure",
    "StructureError",
    "PromiseViolationError",
    "InternalConsistencyError",
    "AuditError",
]

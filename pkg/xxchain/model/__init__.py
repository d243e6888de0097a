"""
XX Chain : Model Subpackage Init
================================

Copyright 2021 MET Norway

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
"""

from xxchain.model.spectrum import (
    ChainParams, PhaseDiagram, Sector, criticalField, groundSector, phaseDiagram, sectorEnergy
)
from xxchain.model.groundstate import SectorState, amplitude, buildState, denseVector
from xxchain.model.entanglement import (
    Bipartition, BlockMatrix, RankReport, buildBlock, numericalRank, schmidtRank, sloccVerdict
)
from xxchain.model.oracle import (
    buildBlockHamiltonian, denseBipartitionRank, groundOfBlock, overlap
)

__all__ = [
    "ChainParams",
    "PhaseDiagram",
    "Sector",
    "criticalField",
    "groundSector",
    "phaseDiagram",
    "sectorEnergy",
    "SectorState",
    "amplitude",
    "buildState",
    "denseVector",
    "Bipartition",
    "BlockMatrix",
    "RankReport",
    "buildBlock",
    "numericalRank",
    "schmidtRank",
    "sloccVerdict",
    "buildBlockHamiltonian",
    "denseBipartitionRank",
    "groundOfBlock",
    "overlap",
]

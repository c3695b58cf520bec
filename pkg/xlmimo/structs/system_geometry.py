"""
Deployment geometry: subarray centers, antenna offsets and UE positions.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import math

from xlmimo.structs.array_container import ArrayContainer


class SystemGeometry(ArrayContainer):
    """Positions in meters.

    Attributes:
        subarray_positions: (L, 3) subarray centers.
        antenna_offsets: (L, M, 3) antenna offsets relative to each center.
        ue_positions: (K, 3) UE positions.
        carrier_wavelength: wavelength in meters.
        area: (width, depth) of the coverage rectangle.
    """
    def __init__(self, subarray_positions, antenna_offsets, ue_positions,
                 carrier_wavelength, area):
        self.subarray_positions = subarray_positions
        self.antenna_offsets = antenna_offsets
        self.ue_positions = ue_positions
        self.carrier_wavelength = carrier_wavelength
        self.area = tuple(area)

    @property
    def L(self):  # pylint: disable=C0103
        return self.subarray_positions.shape[0]

    @property
    def M(self):  # pylint: disable=C0103
        return self.antenna_offsets.shape[1]

    @property
    def K(self):  # pylint: disable=C0103
        return self.ue_positions.shape[0]

    @property
    def side(self):
        """Number of antennas per UPA row."""
        return math.isqrt(self.M)

    def __len__(self):
        return self.K

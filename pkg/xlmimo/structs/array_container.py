"""
Array container represents a set of numpy arrays indexed by UE along their
first axis. It is used by other structures to share common logic.

Licensed under The MIT License
Written by Jean Da Rolt
"""
import copy

import numpy as np


class ArrayContainer():
    def arrays(self):
        """Public array attributes of this container."""
        return {key: value for key, value in self.__dict__.items()
                if not key.startswith('_') and isinstance(value, np.ndarray)}

    def freeze(self):
        """Marks every array read-only so containers can be shared between
        threads."""
        for value in self.arrays().values():
            value.flags.writeable = False
        return self

    def copy(self):
        container = copy.copy(self)
        for key, value in self.arrays().items():
            container.__dict__[key] = value.copy()
        return container

    def select(self, keep):
        """Returns a copy with the same indexing applied to all arrays."""
        container = copy.copy(self)
        for key, value in self.arrays().items():
            container.__dict__[key] = value[keep]
        return container

    def __str__(self):
        to_str = type(self).__name__ + ':'
        for key, array in self.arrays().items():
            to_str += ' ' + key + ': ' + str(array.shape)
        return to_str

    def __len__(self):
        for _, array in self.arrays().items():
            return array.shape[0]
        return 0

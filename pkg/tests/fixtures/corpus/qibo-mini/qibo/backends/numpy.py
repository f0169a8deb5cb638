import numpy as np


class NumpyBackend:
    dtype = complex

    def zero_density_matrix(self, nqubits):
        state = np.zeros(2 * (2**nqubits,), dtype=self.dtype)
        state[0, 0] = 1
        return state

    def plus_state(self, nqubits):
        amplitudes = []
        for i in range(2**nqubits):
            amplitudes.append(1.0)
        return np.array(amplitudes, dtype=self.dtype)

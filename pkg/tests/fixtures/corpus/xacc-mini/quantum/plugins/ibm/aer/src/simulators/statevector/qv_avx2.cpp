#include <cstdint>
#include <cstring>

#include "simulators/statevector/qubitvector.hpp"

namespace AER {
namespace QV {

void apply_matrix_avx2(double *data, size_t num_qubits, const double *mat) {
  const uint64_t stride = 1ULL << (num_qubits + 1);
  uint64_t indexes[1ULL << num_qubits];
  for (uint64_t k = 0; k < stride; k += 2) {
    indexes[k >> 1] = k;
  }
  (void)mat;
  (void)data;
}

} // namespace QV
} // namespace AER

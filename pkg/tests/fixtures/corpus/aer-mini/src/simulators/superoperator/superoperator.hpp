#ifndef _aer_superoperator_hpp_
#define _aer_superoperator_hpp_

#include <cstdint>

#include "simulators/unitary/unitarymatrix.hpp"

namespace AER {
namespace QV {

template <typename data_t>
class Superoperator : public UnitaryMatrix<data_t> {
public:
  using BaseUnitary = UnitaryMatrix<data_t>;
  void set_num_qubits(size_t num_qubits);

private:
  uint64_t data_size_ = 0;
};

template <typename data_t>
void Superoperator<data_t>::set_num_qubits(size_t num_qubits) {
  data_size_ = BITS[2 * num_qubits];
  BaseUnitary::set_num_qubits(2 * num_qubits);
}

} // namespace QV
} // namespace AER

#endif

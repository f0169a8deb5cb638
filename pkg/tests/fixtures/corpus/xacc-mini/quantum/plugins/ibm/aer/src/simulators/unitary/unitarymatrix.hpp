#ifndef _aer_unitary_matrix_hpp_
#define _aer_unitary_matrix_hpp_

#include <cstdint>

#include "simulators/statevector/qubitvector.hpp"

namespace AER {
namespace QV {

template <typename data_t>
class UnitaryMatrix : public QubitVector<data_t> {
public:
  using BaseVector = QubitVector<data_t>;
  void set_num_qubits(size_t num_qubits);

private:
  size_t num_qubits_ = 0;
  uint64_t rows_ = 0;
};

template <typename data_t>
void UnitaryMatrix<data_t>::set_num_qubits(size_t num_qubits) {
  num_qubits_ = num_qubits;
  rows_ = 1ULL << (num_qubits_ * 2);
  BaseVector::set_num_qubits(2 * num_qubits);
}

} // namespace QV
} // namespace AER

#endif

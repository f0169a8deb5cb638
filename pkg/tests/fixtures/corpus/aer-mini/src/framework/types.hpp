#ifndef _aer_framework_types_hpp_
#define _aer_framework_types_hpp_

#include <complex>
#include <vector>

namespace AER {

using complex_t = std::complex<double>;
using cvector_t = std::vector<complex_t>;
using rvector_t = std::vector<double>;

} // namespace AER

#endif

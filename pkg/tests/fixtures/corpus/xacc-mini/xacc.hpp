#ifndef XACC_HPP_
#define XACC_HPP_

#include <memory>
#include <string>

namespace xacc {

void Initialize(int argc, char **argv);
void Finalize();

} // namespace xacc

#endif

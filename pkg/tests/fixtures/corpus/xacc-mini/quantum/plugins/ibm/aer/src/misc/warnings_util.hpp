#ifndef _aer_misc_warnings_util_hpp_
#define _aer_misc_warnings_util_hpp_

#include <iostream>
#include <string>

namespace AER {

inline void log_info(const std::string &message) {
  std::clog << "[aer] " << message << std::endl;
}

} // namespace AER

#endif

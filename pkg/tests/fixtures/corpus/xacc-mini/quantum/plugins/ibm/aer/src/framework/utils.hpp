#ifndef _aer_framework_utils_hpp_
#define _aer_framework_utils_hpp_

#include <string>
#include <vector>

namespace AER {
namespace Utils {

std::string to_lower(const std::string &input);
std::vector<std::string> split(const std::string &input, char delim);

} // namespace Utils
} // namespace AER

#endif

#ifndef _aer_framework_json_parser_hpp_
#define _aer_framework_json_parser_hpp_

#include <string>

namespace AER {

class JsonParser {
public:
  explicit JsonParser(const std::string &text);
  bool has_key(const std::string &key) const;

private:
  std::string text_;
};

} // namespace AER

#endif

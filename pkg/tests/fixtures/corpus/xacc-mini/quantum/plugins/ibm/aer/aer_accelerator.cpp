#include <memory>
#include <string>

namespace xacc {
namespace quantum {

class AerAccelerator {
public:
  void initialize(const std::string &params);
  const std::string name() const { return "aer"; }

private:
  std::string params_;
};

} // namespace quantum
} // namespace xacc

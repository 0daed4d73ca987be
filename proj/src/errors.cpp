#include "vibronoise/errors.hpp"

namespace vibronoise {

namespace {
std::string join_failures(const std::vector<std::string>& failures) {
  std::string out;
  for (const auto& f : failures) {
    if (!out.empty()) out += "; ";
    out += f;
  }
  return out.empty() ? std::string("validation failed") : out;
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> failures)
    : std::runtime_error(join_failures(failures)), failures_(std::move(failures)) {}

}  // namespace vibronoise

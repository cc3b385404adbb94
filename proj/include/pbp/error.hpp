#pragma once

#include <stdexcept>
#include <string>

namespace pbp {

// All library errors carry a stable machine-readable code; the CLI prints
// "error [CODE]: message" on stderr and exits nonzero.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

namespace err {
inline constexpr const char* kParse = "E_PARSE";
inline constexpr const char* kValidate = "E_VALIDATE";
inline constexpr const char* kGeometry = "E_GEOMETRY";
inline constexpr const char* kEmptyMap = "E_EMPTY_MAP";
inline constexpr const char* kEmptyCandidates = "E_EMPTY_CANDIDATES";
inline constexpr const char* kHistory = "E_HISTORY";
inline constexpr const char* kShape = "E_SHAPE";
inline constexpr const char* kConfig = "E_CONFIG";
inline constexpr const char* kVersion = "E_VERSION";
inline constexpr const char* kMetric = "E_METRIC";
inline constexpr const char* kTrain = "E_TRAIN";
inline constexpr const char* kIo = "E_IO";
}  // namespace err

}  // namespace pbp

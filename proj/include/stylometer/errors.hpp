#ifndef STYLOMETER_ERRORS_HPP
#define STYLOMETER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stylometer {

// Broad failure categories, mapped to CLI exit codes (usage=1, data=2, endpoint=3).
enum class ErrorKind { Usage, Data, Endpoint };

// All contract violations carry a stable code string ("EmptyInput",
// "TooFewSentences", ...) so callers and tests can match on the condition
// rather than on message wording.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, ErrorKind kind = ErrorKind::Data)
      : std::runtime_error(code + ": " + message), code_(std::move(code)), kind_(kind) {}

  const std::string& code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string code_;
  ErrorKind kind_;
};

}  // namespace stylometer

#endif  // STYLOMETER_ERRORS_HPP

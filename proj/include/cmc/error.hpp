#ifndef CMC_ERROR_HPP
#define CMC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace cmc {

// Error categories map 1:1 onto CLI exit codes (see tools/main.cpp).
enum class ErrorKind {
  usage = 2,       // bad arguments / API misuse
  data = 3,        // input validation (CSV, response/family mismatch, rank)
  numeric = 4,     // numerical failure (degenerate fit, domain error)
  io = 5           // file system
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& msg) : Error(ErrorKind::usage, msg) {}
};
struct DataError : Error {
  explicit DataError(const std::string& msg) : Error(ErrorKind::data, msg) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(ErrorKind::numeric, msg) {}
};
struct IoError : Error {
  explicit IoError(const std::string& msg) : Error(ErrorKind::io, msg) {}
};

}  // namespace cmc

#endif

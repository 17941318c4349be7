#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace codemark {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed vocabulary file.
class LoadError : public Error {
 public:
  LoadError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class TokenizeError : public Error {
 public:
  explicit TokenizeError(std::size_t offset)
      : Error("no vocabulary entry matches at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PayloadError : public Error {
 public:
  using Error::Error;
};

class SessionError : public Error {
 public:
  using Error::Error;
};

}  // namespace codemark

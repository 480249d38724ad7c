#pragma once

#include <stdexcept>
#include <string>

namespace qmpc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class ResourceLimit : public Error {
 public:
  using Error::Error;
};

class InvalidOperator : public Error {
 public:
  using Error::Error;
};

class KeyErased : public Error {
 public:
  using Error::Error;
};

// Raised when a player or adversary sends something the protocol cannot accept.
class ProtocolViolation : public Error {
 public:
  ProtocolViolation(int player, const std::string& what)
      : Error("player " + std::to_string(player) + ": " + what), player_(player) {}
  int player() const { return player_; }

 private:
  int player_;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class PartitionViolation : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmpc

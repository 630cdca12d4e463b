#pragma once

#include <stdexcept>
#include <string>

namespace gefet {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class SingularMatrix : public Error {
public:
  explicit SingularMatrix(const std::string& msg) : Error(msg) {}
};

class DimensionMismatch : public Error {
public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class TapeMismatch : public Error {
public:
  explicit TapeMismatch(const std::string& msg) : Error(msg) {}
};

class NonFiniteLoss : public Error {
public:
  NonFiniteLoss(const std::string& msg, long step)
      : Error(msg + " at step " + std::to_string(step)), step_(step) {}
  long step() const { return step_; }

private:
  long step_;
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

class EmptyDataset : public Error {
public:
  explicit EmptyDataset(const std::string& msg) : Error(msg) {}
};

class IoError : public Error {
public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class VersionMismatch : public Error {
public:
  explicit VersionMismatch(const std::string& msg) : Error(msg) {}
};

class ChecksumMismatch : public Error {
public:
  explicit ChecksumMismatch(const std::string& msg) : Error(msg) {}
};

}  // namespace gefet

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace contactk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected, const std::string& detail);
  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

class UnknownSymbol : public Error {
 public:
  UnknownSymbol(std::string identifier, std::size_t position);
  const std::string& identifier() const { return identifier_; }
  std::size_t position() const { return position_; }

 private:
  std::string identifier_;
  std::size_t position_;
};

class EvaluationDomainError : public Error {
 public:
  using Error::Error;
};

class AffinityError : public Error {
 public:
  using Error::Error;
};

/// A quantity could be shown neither identically zero nor generically nonzero.
class PivotAmbiguity : public Error {
 public:
  using Error::Error;
};

class SingularModel : public Error {
 public:
  using Error::Error;
};

class NonCanonicalForm : public Error {
 public:
  using Error::Error;
};

class DegenerateContactForm : public Error {
 public:
  using Error::Error;
};

class HamiltonianMismatch : public Error {
 public:
  using Error::Error;
};

class InconsistentResolution : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class SingularWithoutReduction : public Error {
 public:
  using Error::Error;
};

class StepRejected : public Error {
 public:
  using Error::Error;
};

/// Malformed model file or command-line input, located in its source.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The model needs information that cannot be derived automatically.
class UserInputRequired : public Error {
 public:
  using Error::Error;
};

}  // namespace contactk

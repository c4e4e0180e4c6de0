#pragma once

#include <stdexcept>
#include <string>

namespace evoter {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- rule model ---

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, int line, int column)
      : Error("syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line(line), column(column) {}
  int line;
  int column;
};

class UnknownFeature : public Error {
public:
  explicit UnknownFeature(const std::string& name) : Error("unknown feature: " + name) {}
};

class UnknownAction : public Error {
public:
  explicit UnknownAction(const std::string& name) : Error("unknown action: " + name) {}
};

class CoefficientOutOfRange : public Error {
public:
  explicit CoefficientOutOfRange(double value)
      : Error("coefficient " + std::to_string(value) + " outside (0, 1]") {}
};

class InsufficientHistory : public Error {
public:
  InsufficientHistory(int lag, std::size_t available)
      : Error("lag " + std::to_string(lag) + " exceeds available history of " +
              std::to_string(available) + " frame(s)") {}
};

class InvalidSchema : public Error {
public:
  explicit InvalidSchema(const std::string& what) : Error("invalid schema: " + what) {}
};

// --- evolution engine ---

class InvalidParams : public Error {
public:
  explicit InvalidParams(const std::string& what) : Error("invalid parameters: " + what) {}
};

class EmptyPopulation : public Error {
public:
  EmptyPopulation() : Error("population is empty") {}
};

class EmptyParent : public Error {
public:
  EmptyParent() : Error("product crossover requires both parents to have at least one rule") {}
};

class DimensionMismatch : public Error {
public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("objective vector has " + std::to_string(got) + " entries, expected " +
              std::to_string(expected)) {}
};

class EvaluatorFailure : public Error {
public:
  explicit EvaluatorFailure(const std::string& what) : Error("evaluator failed: " + what) {}
};

// --- dataset ---

class HeaderMismatch : public Error {
public:
  explicit HeaderMismatch(const std::string& what) : Error("CSV header mismatch: " + what) {}
};

class CsvParseError : public Error {
public:
  CsvParseError(const std::string& what, std::size_t row, std::size_t column)
      : Error("CSV parse error at row " + std::to_string(row) + ", column " +
              std::to_string(column) + ": " + what),
        row(row), column(column) {}
  std::size_t row;
  std::size_t column;
};

class MissingLabel : public Error {
public:
  explicit MissingLabel(const std::string& what) : Error("missing label: " + what) {}
};

class SeriesTooShort : public Error {
public:
  SeriesTooShort(std::size_t needed, std::size_t got)
      : Error("series of length " + std::to_string(got) + " too short; need at least " +
              std::to_string(needed)) {}
};

class LengthMismatch : public Error {
public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("sequence lengths differ: " + std::to_string(a) + " vs " + std::to_string(b)) {}
};

class EmptyInput : public Error {
public:
  explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

class BadFractions : public Error {
public:
  explicit BadFractions(const std::string& what) : Error("bad split fractions: " + what) {}
};

// --- environments ---

class StepAfterDone : public Error {
public:
  StepAfterDone() : Error("step() called on a finished episode") {}
};

class ActionSetMismatch : public Error {
public:
  explicit ActionSetMismatch(const std::string& what) : Error("action set mismatch: " + what) {}
};

// --- esp ---

class NotFitted : public Error {
public:
  NotFitted() : Error("predictor has not been fitted") {}
};

class TooFewSamples : public Error {
public:
  TooFewSamples(std::size_t got, std::size_t needed)
      : Error("fit() received " + std::to_string(got) + " samples; need at least " +
              std::to_string(needed)) {}
};

// --- cli / config ---

class ConfigError : public Error {
public:
  explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

}  // namespace evoter

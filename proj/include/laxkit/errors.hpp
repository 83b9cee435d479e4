#pragma once

#include <stdexcept>
#include <string>

namespace laxkit {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DivisionByZeroExpression : public Error {
public:
  DivisionByZeroExpression() : Error("division by an expression that normalizes to zero") {}
};

class SelfReferentialBinding : public Error {
public:
  using Error::Error;
};

class NotPolynomialInSelectors : public Error {
public:
  using Error::Error;
};

class UnsupportedExpression : public Error {
public:
  using Error::Error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        detail_(what),
        line_(line),
        column_(column) {}
  const std::string& detail() const noexcept { return detail_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  std::string detail_;
  int line_;
  int column_;
};

class UnknownSymbol : public Error {
public:
  UnknownSymbol(const std::string& symbol, int line, int column)
      : Error("unknown symbol '" + symbol + "' at line " + std::to_string(line) + ", column " +
              std::to_string(column)),
        symbol_(symbol),
        line_(line),
        column_(column) {}
  const std::string& symbol() const noexcept { return symbol_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

private:
  std::string symbol_;
  int line_;
  int column_;
};

class InvalidEquation : public Error {
public:
  using Error::Error;
};

class InvalidManifold : public Error {
public:
  using Error::Error;
};

class NonTermination : public Error {
public:
  using Error::Error;
};

class IncompleteAssignment : public Error {
public:
  using Error::Error;
};

class DegeneratePoint : public Error {
public:
  using Error::Error;
};

class OrderTooLow : public Error {
public:
  using Error::Error;
};

/// Raised when a search request exceeds the order bound p <= 2n+1.
class OrderBoundExceeded : public Error {
public:
  using Error::Error;
};

}  // namespace laxkit

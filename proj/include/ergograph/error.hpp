#ifndef ERGOGRAPH_ERROR_HPP
#define ERGOGRAPH_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace ergograph {

using State = std::vector<int>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed network text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line, int column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class ReducibleChainError : public Error {
 public:
  ReducibleChainError(const std::string& what, std::vector<State> stranded)
      : Error(what), stranded_(std::move(stranded)) {}
  const std::vector<State>& stranded() const { return stranded_; }

 private:
  std::vector<State> stranded_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : Error(what), lower_(lower), upper_(upper) {}
  double lower() const { return lower_; }
  double upper() const { return upper_; }

 private:
  double lower_;
  double upper_;
};

// A path step whose transition rate is zero.
class InactivePathError : public Error {
 public:
  InactivePathError(const std::string& what, State from, State to)
      : Error(what), from_(std::move(from)), to_(std::move(to)) {}
  const State& from() const { return from_; }
  const State& to() const { return to_; }

 private:
  State from_;
  State to_;
};

std::string format_state(const State& x);

}  // namespace ergograph

#endif

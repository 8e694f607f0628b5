#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qtn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad call-site input: out-of-range sizes, unknown names, mismatched domains.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

enum class ParseCode {
  Malformed,     // text does not scan
  NotPartition,  // scans, but blocks don't partition [1..n]
  Crossing,      // partitions [1..n] but has a crossing
  Lex,           // formula text contains a symbol outside the alphabet
  Syntax,        // formula tokens don't parse
};

class ParseError : public Error {
 public:
  ParseError(ParseCode code, std::size_t pos, const std::string& what)
      : Error(what), code(code), pos(pos) {}
  ParseCode code;
  std::size_t pos;  // byte offset where scanning failed (0 when not meaningful)
};

enum class DatasetCode {
  Format,       // file is not a well-formed instance
  Consistency,  // well-formed but bag mass / membership checks fail
};

class DatasetError : public Error {
 public:
  DatasetError(DatasetCode code, const std::string& what) : Error(what), code(code) {}
  DatasetCode code;
};

// A "can't happen" condition: broken internal invariant, not user input.
class InternalError : public Error {
 public:
  using Error::Error;
};

class SearchError : public Error {
 public:
  using Error::Error;
};

}  // namespace qtn

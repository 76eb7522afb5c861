#pragma once

#include "bk/errors.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace bk::cli {

//! Malformed data input; `line` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line) : Error(what), line_(line) {}
  std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

//! Single-column CSV (one value per line, optional header line, blank lines skipped) or a JSON
//! array of numbers when the first non-blank character is '['.
std::vector<double> parse_observations(const std::string& text);
std::vector<double> read_observations(const std::string& path);

std::string read_file(const std::string& path);

} // namespace bk::cli

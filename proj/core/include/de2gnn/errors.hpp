#pragma once

#include <stdexcept>
#include <string>

namespace de2gnn {

// Exit-code mapping for the CLI lives in cli.cpp: ConfigError -> 2,
// DataError -> 3, NumericError -> 4.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Warnings go to stderr unless quiet mode is on.
void set_quiet(bool quiet);
bool quiet();
void warn(const std::string& msg);

}  // namespace de2gnn

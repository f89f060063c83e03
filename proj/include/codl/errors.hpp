#pragma once

#include <stdexcept>
#include <string>

namespace codl {

// Malformed user input: bad file contents, unknown names, invalid arguments.
// The CLI maps this (and std::invalid_argument) to exit code 2.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem trouble: unreadable/unwritable paths. CLI exit code 1.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Exemplar budget cannot cover the learned concepts. CLI exit code 3.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace codl

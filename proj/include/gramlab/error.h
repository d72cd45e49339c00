#ifndef GRAMLAB_ERROR_H_
#define GRAMLAB_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gramlab {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed bracketed input. line() is 1-based; 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string &what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace gramlab

#endif  // GRAMLAB_ERROR_H_

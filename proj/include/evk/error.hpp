#pragma once

#include <stdexcept>
#include <string>

namespace evk {

/// Raised for invalid inputs and malformed data. The CLI maps it to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw Error(message);
    }
}

} // namespace evk

#pragma once

#include <stdexcept>
#include <string>

namespace cbcast {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InconsistentSystem : Error {
    using Error::Error;
};
struct NotNested : Error {
    using Error::Error;
};
struct TooLarge : Error {
    using Error::Error;
};
struct DegenerateDemand : Error {
    using Error::Error;
};
struct DecompositionInvariantViolated : Error {
    using Error::Error;
};
struct FactorizationFailed : Error {
    using Error::Error;
};
struct InvalidCycle : Error {
    using Error::Error;
};
struct CycleBudgetExceeded : Error {
    using Error::Error;
};
struct WrongShape : Error {
    using Error::Error;
};
struct DegenerateConfig : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct InvariantError : Error {
    using Error::Error;
};

}  // namespace cbcast

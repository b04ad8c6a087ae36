#include "taumax/errors.hpp"

#include <utility>

namespace taumax {

NonFiniteError::NonFiniteError(const std::string& what, std::vector<double> state)
    : Error(what), state_(std::move(state)) {}

ChainError::ChainError(const std::string& what, std::size_t step)
    : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

CollinearBasisError::CollinearBasisError(const std::string& what, double condition)
    : Error(what), condition_(condition) {}

ParseError::ParseError(const std::string& what, std::size_t line)
    : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

}  // namespace taumax

#pragma once

#include <stdexcept>
#include <string>

namespace mdiqds {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data (count tables, configs, JSON).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Observed counts admit no photon-number model (decoy LP infeasible).
class InconsistentCountsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The channel leaves no room for a positive QDS rate.
class InsecureChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mdiqds

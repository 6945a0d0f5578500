// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_ERRORS_HPP
#define SPM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace spm {

/// Unreadable or unwritable files, truncated data.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally invalid file contents or unsupported formats.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated preconditions on values (out-of-range parameters, mismatched
/// dimensions, invalid indices).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace spm

#endif  // SPM_ERRORS_HPP

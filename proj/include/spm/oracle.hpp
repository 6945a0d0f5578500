// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_ORACLE_HPP
#define SPM_ORACLE_HPP

#include <vector>

#include "spm/search.hpp"

namespace spm {

/// Exhaustive minimum-distance match per query superpixel over every
/// (image, superpixel) pair in the library. Ties pick the lowest ids.
/// Intended for desk-scale validation of the randomized search.
std::vector<Match> brute_force_match(const SearchContext& ctx,
                                     unsigned threads = 1);

}  // namespace spm

#endif  // SPM_ORACLE_HPP

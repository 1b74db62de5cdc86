#ifndef IQSWITCH_MATCHING_HPP
#define IQSWITCH_MATCHING_HPP

#include "iqswitch/switch_core.hpp"

namespace iqswitch {

/// Maximum-weight perfect matching of q by the O(n^3) Hungarian method.
///
/// Among all maximizers the lexicographically smallest permutation is
/// returned: with the optimal dual potentials in hand, every optimal
/// matching lives on the tight edges, so rows are fixed in order to the
/// smallest tight column that still admits a perfect tight matching.
Schedule max_weight_matching(const QueueMatrix& q);

/// max_s <q, s>.
std::int64_t max_weight(const QueueMatrix& q);

} // namespace iqswitch

#endif // IQSWITCH_MATCHING_HPP

#include "iqswitch/switch_core.hpp"

#include <limits>
#include <sstream>

namespace iqswitch {

Schedule::Schedule(std::vector<int> perm) : perm_(std::move(perm)) {
    if (!is_permutation(perm_)) throw ConfigError("Schedule: not a permutation");
}

Schedule Schedule::identity(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    return Schedule(std::move(perm));
}

bool Schedule::is_permutation(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    std::vector<char> seen(perm.size(), 0);
    for (int j : perm) {
        if (j < 0 || j >= n || seen[static_cast<std::size_t>(j)]) return false;
        seen[static_cast<std::size_t>(j)] = 1;
    }
    return true;
}

std::string Schedule::to_string() const {
    std::ostringstream out;
    out << '[';
    for (int i = 0; i < size(); ++i) out << (i ? " " : "") << (*this)[i];
    out << ']';
    return out.str();
}

void validate_queues(const QueueMatrix& q) {
    if (q.rows() != q.cols()) throw ConfigError("queue matrix must be square");
    if (q.rows() < 2) throw ConfigError("switch needs at least two ports");
    if ((q.array() < 0).any()) throw ConfigError("queue matrix has a negative entry");
}

int step_in_place(QueueMatrix& q, const ArrivalMatrix& a, const Schedule& s, QueueMatrix& unused) {
    constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
    const Index n = q.rows();
    int wasted = 0;
    unused.setZero(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            if (q(i, j) > kMax - a(i, j)) throw OverflowError("queue length overflow");
            q(i, j) += a(i, j);
        }
    }
    for (int i = 0; i < s.size(); ++i) {
        std::int64_t& cell = q(i, s[i]);
        if (cell > 0) {
            --cell;
        } else {
            unused(i, s[i]) = 1;
            ++wasted;
        }
    }
    return wasted;
}

SlotOutcome step(const QueueMatrix& q, const ArrivalMatrix& a, const Schedule& s) {
    validate_queues(q);
    const Index n = q.rows();
    if (a.rows() != n || a.cols() != n) throw ConfigError("step: arrival matrix has the wrong shape");
    if (s.size() != n) throw ConfigError("step: schedule has the wrong size");
    if ((a.array() < 0).any()) throw ConfigError("step: negative arrivals");

    SlotOutcome out{a, s, QueueMatrix::Zero(n, n), q};
    step_in_place(out.next_q, a, s, out.unused);
    return out;
}

} // namespace iqswitch

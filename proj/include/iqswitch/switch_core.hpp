#ifndef IQSWITCH_SWITCH_CORE_HPP
#define IQSWITCH_SWITCH_CORE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "iqswitch/errors.hpp"

namespace iqswitch {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// q(t): packets waiting at input i for output j. Entries are nonnegative.
using QueueMatrix = Matrix<std::int64_t>;
/// a(t): packets arriving at input i for output j during one slot.
using ArrivalMatrix = Matrix<std::int64_t>;

/// A perfect matching between inputs and outputs, stored as a permutation:
/// input i is connected to output perm[i].
class Schedule {
public:
    Schedule() = default;
    explicit Schedule(std::vector<int> perm);

    static Schedule identity(int n);
    /// Skips the permutation check; for hot loops that build permutations
    /// by construction.
    static Schedule unchecked(std::vector<int> perm) {
        Schedule s;
        s.perm_ = std::move(perm);
        return s;
    }

    int size() const noexcept { return static_cast<int>(perm_.size()); }
    int operator[](int input) const { return perm_[static_cast<std::size_t>(input)]; }
    const std::vector<int>& permutation() const noexcept { return perm_; }

    /// Exchanges the outputs assigned to inputs i and k.
    void swap_outputs(int i, int k) { std::swap(perm_[static_cast<std::size_t>(i)], perm_[static_cast<std::size_t>(k)]); }

    /// The 0/1 matrix view S with S(i, perm[i]) = 1.
    template <typename Scalar = std::int64_t>
    Matrix<Scalar> matrix() const {
        Matrix<Scalar> s = Matrix<Scalar>::Zero(size(), size());
        for (int i = 0; i < size(); ++i) s(i, (*this)[i]) = Scalar(1);
        return s;
    }

    /// True iff perm is a permutation of {0..n-1}.
    static bool is_permutation(const std::vector<int>& perm);

    std::string to_string() const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
    friend auto operator<=>(const Schedule& a, const Schedule& b) { return a.perm_ <=> b.perm_; }

private:
    std::vector<int> perm_;
};

/// Result of one slot of the switch dynamics.
struct SlotOutcome {
    ArrivalMatrix arrivals;
    Schedule served;
    QueueMatrix unused;   // u(t), 0/1
    QueueMatrix next_q;   // q(t+1) = q + a - s + u
};

/// Sum of the queue lengths served by s: sum_i q(i, s[i]).
template <typename Derived>
typename Derived::Scalar weight(const Eigen::MatrixBase<Derived>& q, const Schedule& s) {
    if (q.rows() != s.size() || q.cols() != s.size())
        throw ConfigError("weight: schedule size does not match queue matrix");
    typename Derived::Scalar w(0);
    for (int i = 0; i < s.size(); ++i) w += q(i, s[i]);
    return w;
}

/// Throws ConfigError unless q is square, n >= 2 and every entry is nonnegative.
void validate_queues(const QueueMatrix& q);

/// One slot: q(t+1) = [q(t) + a(t) - s(t)]^+, with the clipped service
/// materialized as u(t).
SlotOutcome step(const QueueMatrix& q, const ArrivalMatrix& a, const Schedule& s);

/// Allocation-free form of step used inside simulation loops. Updates q to
/// q(t+1) and writes u(t) into unused; returns the number of wasted services.
/// Inputs are assumed validated by the caller.
int step_in_place(QueueMatrix& q, const ArrivalMatrix& a, const Schedule& s, QueueMatrix& unused);

} // namespace iqswitch

#endif // IQSWITCH_SWITCH_CORE_HPP

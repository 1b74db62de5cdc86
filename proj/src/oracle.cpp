#include "iqswitch/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace iqswitch::oracle {
namespace {

std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::int64_t perm_weight(const QueueMatrix& q, const std::vector<int>& perm) {
    std::int64_t w = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) w += q(static_cast<Index>(i), perm[i]);
    return w;
}

void require_square(const QueueMatrix& q) {
    if (q.rows() != q.cols() || q.rows() < 1) throw ConfigError("oracle: queue matrix must be square");
}

Eigen::VectorXd solve_truncated(double lambda, double mu, int q_max) {
    const double up = lambda * (1.0 - mu);
    const double down = mu * (1.0 - lambda);
    const int size = q_max + 1;
    // Rows of A are the balance equations pi (P - I) = 0, the last one
    // replaced by the normalization sum(pi) = 1.
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(4 * size));
    for (int k = 0; k < size - 1; ++k) {
        // Column k of (P - I)^T is the flow balance of state k:
        // inflow from k-1 (up) and k+1 (down), outflow from k.
        const double out = (k == 0 ? up : up + down);
        entries.emplace_back(k, k, -out);
        if (k > 0) entries.emplace_back(k, k - 1, up);
        entries.emplace_back(k, k + 1, down);
    }
    for (int k = 0; k < size; ++k) entries.emplace_back(size - 1, k, 1.0);
    Eigen::SparseMatrix<double> a(size, size);
    a.setFromTriplets(entries.begin(), entries.end());
    a.makeCompressed();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
    b(size - 1) = 1.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw ConfigError("birth-death solve failed");
    return lu.solve(b);
}

} // namespace

BirthDeathSolution exact_single_queue_mean(double lambda, double mu, int q_max) {
    if (!(lambda >= 0.0 && lambda < mu && mu <= 1.0))
        throw ConfigError("single queue needs 0 <= lambda < mu <= 1");
    q_max = std::max(q_max, 2);
    BirthDeathSolution sol{lambda, mu, q_max, {}, 0.0, 0.0};
    for (;;) {
        sol.pi = solve_truncated(lambda, mu, q_max);
        if (sol.pi(q_max) < 1e-10) break;
        if (q_max > (1 << 22)) throw ConfigError("birth-death truncation did not reach the tail target");
        q_max *= 2;
    }
    sol.q_max = q_max;
    const double up = lambda * (1.0 - mu);
    const double down = mu * (1.0 - lambda);
    for (int k = 0; k <= q_max; ++k) sol.mean += k * sol.pi(k);
    for (int k = 0; k < q_max; ++k)
        sol.detailed_balance_residual =
            std::max(sol.detailed_balance_residual, std::abs(sol.pi(k) * up - sol.pi(k + 1) * down));
    return sol;
}

MatchingResult brute_force_matching(const QueueMatrix& q) {
    require_square(q);
    if (q.rows() > 8) throw ConfigError("brute_force_matching: n > 8");
    MatchingResult best{std::numeric_limits<std::int64_t>::min(), {}};
    for (const auto& perm : all_permutations(static_cast<int>(q.rows()))) {
        const std::int64_t w = perm_weight(q, perm);
        if (w > best.weight) best = {w, Schedule(perm)};
    }
    return best;
}

double exact_expected_weight_power_of_d(const QueueMatrix& q, int d) {
    require_square(q);
    if (q.rows() > 4 || d < 1 || d > 3) throw ConfigError("power_of_d enumeration needs n <= 4, 1 <= d <= 3");
    std::vector<std::int64_t> w;
    for (const auto& perm : all_permutations(static_cast<int>(q.rows()))) w.push_back(perm_weight(q, perm));
    const std::size_t m = w.size();
    std::size_t tuples = 1;
    for (int k = 0; k < d; ++k) tuples *= m;
    long double total = 0;
    for (std::size_t code = 0; code < tuples; ++code) {
        std::size_t rest = code;
        std::int64_t best = std::numeric_limits<std::int64_t>::min();
        for (int k = 0; k < d; ++k) {
            best = std::max(best, w[rest % m]);
            rest /= m;
        }
        total += best;
    }
    return static_cast<double>(total / tuples);
}

double exact_expected_weight_random_1_flip(const QueueMatrix& q) {
    require_square(q);
    const int n = static_cast<int>(q.rows());
    if (n > 5) throw ConfigError("random 1-flip enumeration needs n <= 5");
    if (n < 2) return static_cast<double>(q(0, 0));
    long double total = 0;
    std::int64_t cases = 0;
    for (const auto& perm : all_permutations(n)) {
        const std::int64_t base = perm_weight(q, perm);
        for (int i = 0; i < n; ++i) {
            for (int k = i + 1; k < n; ++k) {
                const int j = perm[static_cast<std::size_t>(i)];
                const int l = perm[static_cast<std::size_t>(k)];
                const std::int64_t gain = q(i, l) + q(k, j) - q(i, j) - q(k, l);
                total += base + std::max<std::int64_t>(gain, 0);
                ++cases;
            }
        }
    }
    return static_cast<double>(total / cases);
}

Eigen::MatrixXd active_set_projection(const Eigen::MatrixXd& x) {
    const Index n = x.rows();
    if (x.cols() != n || n < 1) throw ConfigError("active_set_projection: square input required");
    if (n > 3) throw ConfigError("active_set_projection: n > 3");
    const Index dim = n * n;

    // Columns: vec(e^i) for each row i, then vec(e~^j) for each column j
    // (column-major vectorization, entry (i, j) at i + n j).
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(dim, 2 * n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            basis(i + n * j, i) = 1.0;
            basis(i + n * j, n + j) = 1.0;
        }
    const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(x.data(), dim);

    Eigen::VectorXd best = Eigen::VectorXd::Zero(dim);
    double best_dist = target.squaredNorm();
    for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
        std::vector<Index> zeros;
        for (Index k = 0; k < dim; ++k)
            if (mask & (1u << k)) zeros.push_back(k);
        Eigen::MatrixXd free_basis;
        if (zeros.empty()) {
            free_basis = basis;
        } else {
            Eigen::MatrixXd constrained(static_cast<Index>(zeros.size()), 2 * n);
            for (std::size_t r = 0; r < zeros.size(); ++r) constrained.row(static_cast<Index>(r)) = basis.row(zeros[r]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(constrained);
            if (lu.rank() == 2 * n) continue;  // only y = 0, already the starting candidate
            free_basis = basis * lu.kernel();
        }
        const Eigen::VectorXd coef = free_basis.completeOrthogonalDecomposition().solve(target);
        const Eigen::VectorXd y = free_basis * coef;
        if (y.minCoeff() < -1e-10) continue;
        const double dist = (target - y).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = y;
        }
    }
    return Eigen::Map<const Eigen::MatrixXd>(best.data(), n, n);
}

} // namespace iqswitch::oracle

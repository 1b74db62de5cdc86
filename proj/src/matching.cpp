#include "iqswitch/matching.hpp"

#include <limits>
#include <vector>

namespace iqswitch {
namespace {

struct Assignment {
    std::vector<int> col_of_row;
    std::vector<std::int64_t> u;  // row potentials, 1-based
    std::vector<std::int64_t> v;  // column potentials, 1-based
};

// Minimizes sum cost(i, perm[i]) with cost = -q. Potentials keep
// cost(i,j) - u[i] - v[j] >= 0 with equality on the returned matching.
Assignment hungarian(const QueueMatrix& q) {
    const int n = static_cast<int>(q.rows());
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);

    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            std::int64_t delta = kInf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const std::int64_t cur = -q(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    Assignment out{std::vector<int>(static_cast<std::size_t>(n)), std::move(u), std::move(v)};
    for (int j = 1; j <= n; ++j) out.col_of_row[static_cast<std::size_t>(p[j] - 1)] = j - 1;
    return out;
}

class TightGraph {
public:
    TightGraph(const QueueMatrix& q, const Assignment& a)
        : n_(static_cast<int>(q.rows())), tight_(static_cast<std::size_t>(n_ * n_)) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                tight_[idx(i, j)] = (-q(i, j) - a.u[i + 1] - a.v[j + 1]) == 0;
    }

    bool tight(int i, int j) const { return tight_[idx(i, j)] != 0; }

private:
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i * n_ + j); }
    int n_;
    std::vector<char> tight_;
};

class Canonicalizer {
public:
    Canonicalizer(const TightGraph& g, std::vector<int> col_of_row)
        : g_(g), n_(static_cast<int>(col_of_row.size())), col_of_row_(std::move(col_of_row)),
          row_of_col_(static_cast<std::size_t>(n_)), fixed_(static_cast<std::size_t>(n_), 0),
          seen_(static_cast<std::size_t>(n_)) {
        for (int i = 0; i < n_; ++i) row_of_col_[static_cast<std::size_t>(col_of_row_[static_cast<std::size_t>(i)])] = i;
    }

    std::vector<int> run() {
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (!g_.tight(i, j)) continue;
                const int owner = row_of_col_[static_cast<std::size_t>(j)];
                if (fixed_[static_cast<std::size_t>(owner)] && owner != i) continue;
                if (owner == i || reroute(i, j)) break;
            }
            fixed_[static_cast<std::size_t>(i)] = 1;
        }
        return col_of_row_;
    }

private:
    // Moves row i onto column j, provided the displaced row can reach the
    // column i releases through an alternating path of tight edges.
    bool reroute(int i, int j) {
        const int freed = col_of_row_[static_cast<std::size_t>(i)];
        const int displaced = row_of_col_[static_cast<std::size_t>(j)];
        std::fill(seen_.begin(), seen_.end(), 0);
        seen_[static_cast<std::size_t>(j)] = 1;
        // Tentatively give j to i and release `freed`.
        col_of_row_[static_cast<std::size_t>(i)] = j;
        row_of_col_[static_cast<std::size_t>(j)] = i;
        row_of_col_[static_cast<std::size_t>(freed)] = -1;
        fixed_[static_cast<std::size_t>(i)] = 1;
        if (augment(displaced)) return true;
        // Undo.
        fixed_[static_cast<std::size_t>(i)] = 0;
        col_of_row_[static_cast<std::size_t>(i)] = freed;
        row_of_col_[static_cast<std::size_t>(freed)] = i;
        row_of_col_[static_cast<std::size_t>(j)] = displaced;
        return false;
    }

    bool augment(int row) {
        for (int c = 0; c < n_; ++c) {
            if (seen_[static_cast<std::size_t>(c)] || !g_.tight(row, c)) continue;
            const int other = row_of_col_[static_cast<std::size_t>(c)];
            if (other >= 0 && fixed_[static_cast<std::size_t>(other)]) continue;
            seen_[static_cast<std::size_t>(c)] = 1;
            if (other < 0 || augment(other)) {
                col_of_row_[static_cast<std::size_t>(row)] = c;
                row_of_col_[static_cast<std::size_t>(c)] = row;
                return true;
            }
        }
        return false;
    }

    const TightGraph& g_;
    int n_;
    std::vector<int> col_of_row_;
    std::vector<int> row_of_col_;
    std::vector<char> fixed_;
    std::vector<char> seen_;
};

} // namespace

Schedule max_weight_matching(const QueueMatrix& q) {
    if (q.rows() != q.cols()) throw ConfigError("max_weight_matching: queue matrix must be square");
    const Assignment a = hungarian(q);
    const TightGraph g(q, a);
    return Schedule(Canonicalizer(g, a.col_of_row).run());
}

std::int64_t max_weight(const QueueMatrix& q) {
    if (q.rows() != q.cols()) throw ConfigError("max_weight: queue matrix must be square");
    const Assignment a = hungarian(q);
    std::int64_t w = 0;
    for (int i = 0; i < static_cast<int>(q.rows()); ++i) w += q(i, a.col_of_row[static_cast<std::size_t>(i)]);
    return w;
}

} // namespace iqswitch

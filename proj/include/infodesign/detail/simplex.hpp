#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "infodesign/errors.hpp"

namespace infodesign::detail {

// Small dense two-phase simplex:
//   max  c'x
//   s.t. A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
// Bland's rule for anti-cycling.  Problem sizes here are tiny (tens of
// variables, a few hundred rows), so a dense tableau is the simplest thing
// that is actually robust.
struct LpResult {
    bool feasible = false;
    double objective = 0;
    std::vector<double> x;
};

class Simplex {
public:
    LpResult solve(const std::vector<double>& c, const std::vector<std::vector<double>>& A_ub,
                   const std::vector<double>& b_ub, const std::vector<std::vector<double>>& A_eq,
                   const std::vector<double>& b_eq) {
        n_ = c.size();
        m_ = A_ub.size() + A_eq.size();

        std::size_t extra = 0;
        for (double b : b_ub) extra += (b < 0) ? 2 : 1;
        extra += A_eq.size();
        cols_ = n_ + extra;  // structural + slack/surplus/artificial
        tab_.assign(m_, std::vector<double>(cols_ + 1, 0.0));
        basis_.assign(m_, -1);
        artificial_.assign(cols_, 0);

        std::size_t col = n_, row = 0;
        auto place = [&](const std::vector<double>& a, double b, bool eq) {
            double sign = (b < 0) ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n_; ++j) tab_[row][j] = sign * a[j];
            tab_[row][cols_] = sign * b;
            if (!eq && sign > 0) {
                tab_[row][col] = 1.0;  // slack, basic
                basis_[row] = int(col++);
            } else if (!eq) {
                tab_[row][col++] = -1.0;  // surplus
                tab_[row][col] = 1.0;     // artificial, basic
                artificial_[col] = 1;
                basis_[row] = int(col++);
            } else {
                tab_[row][col] = 1.0;  // artificial, basic
                artificial_[col] = 1;
                basis_[row] = int(col++);
            }
            ++row;
        };
        for (std::size_t i = 0; i < A_ub.size(); ++i) place(A_ub[i], b_ub[i], false);
        for (std::size_t i = 0; i < A_eq.size(); ++i) place(A_eq[i], b_eq[i], true);

        LpResult res;
        bool any_art = false;
        for (std::size_t j = 0; j < cols_; ++j) any_art |= bool(artificial_[j]);
        if (any_art) {
            std::vector<double> obj1(cols_, 0.0);
            for (std::size_t j = 0; j < cols_; ++j)
                if (artificial_[j]) obj1[j] = -1.0;
            blocked_.assign(cols_, 0);
            double p1 = run(obj1);
            if (p1 < -1e-7) return res;  // infeasible
            // pivot leftover artificials out of the basis if possible
            for (std::size_t i = 0; i < m_; ++i) {
                if (basis_[i] >= 0 && artificial_[std::size_t(basis_[i])]) {
                    for (std::size_t j = 0; j < cols_; ++j)
                        if (!artificial_[j] && std::abs(tab_[i][j]) > 1e-9) {
                            pivot(i, j);
                            break;
                        }
                }
            }
        }

        std::vector<double> obj2(cols_, 0.0);
        for (std::size_t j = 0; j < n_; ++j) obj2[j] = c[j];
        blocked_ = artificial_;
        double z = run(obj2);

        res.feasible = true;
        res.objective = z;
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] >= 0 && std::size_t(basis_[i]) < n_)
                res.x[std::size_t(basis_[i])] = tab_[i][cols_];
        return res;
    }

private:
    void pivot(std::size_t pr, std::size_t pc) {
        double pv = tab_[pr][pc];
        for (auto& v : tab_[pr]) v /= pv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == pr) continue;
            double f = tab_[i][pc];
            if (f == 0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) tab_[i][j] -= f * tab_[pr][j];
        }
        basis_[pr] = int(pc);
    }

    double run(const std::vector<double>& obj) {
        std::vector<double> red(cols_, 0.0);
        double z = 0;
        const long max_pivots = 200000;
        for (long it = 0; it < max_pivots; ++it) {
            for (std::size_t j = 0; j < cols_; ++j) red[j] = obj[j];
            z = 0;
            for (std::size_t i = 0; i < m_; ++i) {
                double cb = obj[std::size_t(basis_[i])];
                if (cb == 0) continue;
                z += cb * tab_[i][cols_];
                for (std::size_t j = 0; j < cols_; ++j) red[j] -= cb * tab_[i][j];
            }
            std::size_t pc = cols_;
            for (std::size_t j = 0; j < cols_; ++j) {  // Bland: first improving column
                if (blocked_[j]) continue;
                if (red[j] > 1e-10) {
                    pc = j;
                    break;
                }
            }
            if (pc == cols_) return z;
            std::size_t pr = m_;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][pc] > 1e-11) {
                    double ratio = tab_[i][cols_] / tab_[i][pc];
                    if (ratio < best - 1e-12 ||
                        (ratio < best + 1e-12 && (pr == m_ || basis_[i] < basis_[pr]))) {
                        best = ratio;
                        pr = i;
                    }
                }
            }
            if (pr == m_) throw SolverStall("LP unbounded");
            pivot(pr, pc);
        }
        throw SolverStall("simplex pivot cap exceeded");
    }

    std::size_t n_ = 0, m_ = 0, cols_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
    std::vector<char> artificial_, blocked_;
};

inline LpResult solve_lp(const std::vector<double>& c,
                         const std::vector<std::vector<double>>& A_ub,
                         const std::vector<double>& b_ub,
                         const std::vector<std::vector<double>>& A_eq,
                         const std::vector<double>& b_eq) {
    Simplex s;
    return s.solve(c, A_ub, b_ub, A_eq, b_eq);
}

}  // namespace infodesign::detail

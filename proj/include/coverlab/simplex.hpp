#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "coverlab/common.hpp"

namespace coverlab {

/// Dense two-phase primal simplex for the small feasibility problems that
/// arise when a coverage coefficient is defined through an inf over
/// distributions. Solves
///     find x >= 0 with A x = b
/// via phase-1 artificial variables and Bland's rule (no cycling). Problem
/// sizes here are tens of rows by a few hundred columns, so no factorization
/// or pricing tricks are needed.
struct LinearFeasibility {
    bool feasible = false;
    std::vector<double> x;
    double residual = 0.0;  // phase-1 objective at termination
};

inline LinearFeasibility solve_equality_feasibility(std::vector<std::vector<double>> a,
                                                    std::vector<double> b,
                                                    double tol = 1e-10) {
    const int rows = static_cast<int>(a.size());
    if (rows == 0) return {true, {}, 0.0};
    const int cols = static_cast<int>(a[0].size());
    for (int i = 0; i < rows; ++i)
        if (b[i] < 0.0) {
            for (double& v : a[i]) v = -v;
            b[i] = -b[i];
        }

    // tableau over [x | artificials], phase-1 objective = sum of artificials
    const int total = cols + rows;
    std::vector<std::vector<double>> t(rows, std::vector<double>(total + 1, 0.0));
    std::vector<int> basis(rows);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) t[i][j] = a[i][j];
        t[i][cols + i] = 1.0;
        t[i][total] = b[i];
        basis[i] = cols + i;
    }
    std::vector<double> obj(total + 1, 0.0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j <= total; ++j) obj[j] += t[i][j];
    for (int i = 0; i < rows; ++i) obj[cols + i] = 0.0;

    const int max_iter = 200 * (rows + cols) + 1000;
    for (int iter = 0; iter < max_iter; ++iter) {
        int enter = -1;  // Bland: least index with positive reduced objective;
                         // artificials never re-enter
        for (int j = 0; j < cols; ++j)
            if (obj[j] > tol) { enter = j; break; }
        if (enter < 0) break;
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < rows; ++i) {
            if (t[i][enter] <= tol) continue;
            double ratio = t[i][total] / t[i][enter];
            if (leave < 0 || ratio < best_ratio - tol ||
                (std::abs(ratio - best_ratio) <= tol && basis[i] < basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) break;  // unbounded phase-1 cannot happen; guard anyway
        double piv = t[leave][enter];
        for (int j = 0; j <= total; ++j) t[leave][j] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == leave || std::abs(t[i][enter]) <= 0.0) continue;
            double f = t[i][enter];
            for (int j = 0; j <= total; ++j) t[i][j] -= f * t[leave][j];
        }
        double fo = obj[enter];
        for (int j = 0; j <= total; ++j) obj[j] -= fo * t[leave][j];
        basis[leave] = enter;
    }

    LinearFeasibility out;
    out.residual = obj[total];
    out.feasible = std::abs(out.residual) <= 1e-8;
    out.x.assign(cols, 0.0);
    for (int i = 0; i < rows; ++i)
        if (basis[i] < cols) out.x[basis[i]] = t[i][total];
    return out;
}

}  // namespace coverlab

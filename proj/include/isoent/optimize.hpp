// isoent/optimize.hpp
// Small derivative-free optimizers for the low-dimensional fitting problems:
// a Nelder-Mead simplex search and a finite-difference Levenberg-Marquardt
// least-squares polisher. Both are deterministic given their inputs.

#pragma once

#include "isoent/core.hpp"

#include <functional>

namespace isoent {

struct NelderMeadResult {
    std::vector<double> x;
    double fval = 0;
    int evals = 0;
    bool converged = false;
};

// Classic Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
// Stops when the simplex is small in both f-spread and x-diameter.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0, double step,
                             double ftol = 1e-15, double xtol = 1e-10, int max_evals = 4000) {
    const int n = static_cast<int>(x0.size());
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> fv(n + 1);
    int evals = 0;
    for (int i = 1; i <= n; ++i) pts[i][i - 1] += step;
    for (int i = 0; i <= n; ++i) fv[i] = (++evals, f(pts[i]));

    auto order = [&] {
        for (int i = 1; i <= n; ++i) {
            auto p = pts[i];
            double v = fv[i];
            int j = i;
            while (j > 0 && fv[j - 1] > v) {
                fv[j] = fv[j - 1];
                pts[j] = pts[j - 1];
                --j;
            }
            fv[j] = v;
            pts[j] = std::move(p);
        }
    };
    order();

    while (evals < max_evals) {
        double diam = 0;
        for (int i = 1; i <= n; ++i)
            for (int k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[0][k]));
        if (fv[n] - fv[0] <= ftol && diam <= xtol) break;

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) centroid[k] += pts[i][k] / n;

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (int k = 0; k < n; ++k) p[k] = centroid[k] + t * (pts[n][k] - centroid[k]);
            return p;
        };

        auto xr = blend(-1.0);
        double fr = (++evals, f(xr));
        if (fr < fv[0]) {
            auto xe = blend(-2.0);
            double fe = (++evals, f(xe));
            if (fe < fr) {
                pts[n] = std::move(xe);
                fv[n] = fe;
            } else {
                pts[n] = std::move(xr);
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            pts[n] = std::move(xr);
            fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? -0.5 : 0.5);
            double fc = (++evals, f(xc));
            if (fc < std::min(fr, fv[n])) {
                pts[n] = std::move(xc);
                fv[n] = fc;
            } else {
                for (int i = 1; i <= n; ++i) {
                    for (int k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                    fv[i] = (++evals, f(pts[i]));
                }
            }
        }
        order();
    }

    NelderMeadResult r;
    r.x = pts[0];
    r.fval = fv[0];
    r.evals = evals;
    r.converged = fv[n] - fv[0] <= ftol || evals < max_evals;
    return r;
}

struct LeastSquaresResult {
    std::vector<double> x;
    double cost = 0;  // sum of squared residuals
    int iters = 0;
};

// Levenberg-Marquardt with central-difference Jacobian. m residuals, n params.
template <class R>
LeastSquaresResult levenberg_marquardt(R&& resid, std::vector<double> x, int max_iters = 60,
                                       double fd_step = 1e-7, double cost_tol = 1e-28) {
    const int n = static_cast<int>(x.size());
    auto eval = [&](const std::vector<double>& p) {
        std::vector<double> r = resid(p);
        double c = 0;
        for (double v : r) c += v * v;
        return std::pair<std::vector<double>, double>(std::move(r), c);
    };
    auto [r, cost] = eval(x);
    const int m = static_cast<int>(r.size());
    double lambda = 1e-8;
    int it = 0;
    for (; it < max_iters && cost > cost_tol; ++it) {
        Eigen::MatrixXd jac(m, n);
        for (int j = 0; j < n; ++j) {
            auto xp = x, xm = x;
            xp[j] += fd_step;
            xm[j] -= fd_step;
            auto rp = resid(xp), rm = resid(xm);
            for (int i = 0; i < m; ++i) jac(i, j) = (rp[i] - rm[i]) / (2.0 * fd_step);
        }
        Eigen::VectorXd rv(m);
        for (int i = 0; i < m; ++i) rv(i) = r[i];
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd jtr = jac.transpose() * rv;
        bool improved = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd a = jtj + lambda * Eigen::MatrixXd::Identity(n, n);
            Eigen::VectorXd step = a.ldlt().solve(-jtr);
            auto xn = x;
            for (int j = 0; j < n; ++j) xn[j] += step(j);
            auto [rn, cn] = eval(xn);
            if (cn < cost) {
                x = std::move(xn);
                r = std::move(rn);
                cost = cn;
                lambda = std::max(lambda * 0.25, 1e-14);
                improved = true;
                break;
            }
            lambda *= 8.0;
        }
        if (!improved) break;
    }
    return LeastSquaresResult{std::move(x), cost, it};
}

}  // namespace isoent

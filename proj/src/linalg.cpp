#include "cbamgrid/linalg.hpp"

#include <cmath>

#include "cbamgrid/errors.hpp"

namespace cbamgrid::linalg {

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        raise(ErrorKind::Shape, "matmul: incompatible " + a.shape_str() + " and " + b.shape_str());
    Tensor c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int p = 0; p < a.cols(); ++p) {
            const double v = a.at(i, p);
            if (v == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c.at(i, j) += v * b.at(p, j);
        }
    return c;
}

Tensor transpose(const Tensor& a) {
    Tensor t(a.cols(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) t.at(j, i) = a.at(i, j);
    return t;
}

std::vector<double> solve(Tensor a, std::vector<double> b) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n)
        raise(ErrorKind::Shape, "solve: need square system, got " + a.shape_str());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a.at(r, col)) > std::fabs(a.at(piv, col))) piv = r;
        if (std::fabs(a.at(piv, col)) < 1e-14)
            raise(ErrorKind::Estimation, "singular system at pivot " + std::to_string(col));
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a.at(piv, j), a.at(col, j));
            std::swap(b[piv], b[col]);
        }
        const double inv = 1.0 / a.at(col, col);
        for (int r = col + 1; r < n; ++r) {
            const double f = a.at(r, col) * inv;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) a.at(r, j) -= f * a.at(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= a.at(i, j) * x[j];
        x[i] = s / a.at(i, i);
    }
    return x;
}

LstsqResult lstsq(const Tensor& x, const std::vector<double>& y,
                  const std::vector<std::string>& names) {
    const int rows = x.rows(), k = x.cols();
    if (static_cast<int>(y.size()) != rows)
        raise(ErrorKind::Shape, "lstsq: X has " + std::to_string(rows) + " rows, y has " +
                                    std::to_string(y.size()));
    if (static_cast<int>(names.size()) != k)
        raise(ErrorKind::Contract, "lstsq: expected " + std::to_string(k) + " column names");
    if (rows < k) raise(ErrorKind::Estimation, "lstsq: underdetermined system");

    // Normal equations with symmetric pivoted elimination for rank detection.
    Tensor xtx(k, k);
    std::vector<double> xty(k, 0.0);
    for (int r = 0; r < rows; ++r) {
        for (int i = 0; i < k; ++i) {
            const double xi = x.at(r, i);
            if (xi == 0.0) continue;
            xty[i] += xi * y[r];
            for (int j = i; j < k; ++j) xtx.at(i, j) += xi * x.at(r, j);
        }
    }
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j) xtx.at(i, j) = xtx.at(j, i);

    double max_diag = 0.0;
    for (int i = 0; i < k; ++i) max_diag = std::max(max_diag, std::fabs(xtx.at(i, i)));
    const double tol = std::max(max_diag, 1.0) * 1e-10;

    // Gaussian elimination without row exchange (SPD up to rank deficiency);
    // a vanishing pivot identifies a linearly dependent column.
    Tensor a = xtx;
    std::vector<double> b = xty;
    std::vector<int> bad_cols;
    for (int col = 0; col < k; ++col) {
        if (std::fabs(a.at(col, col)) < tol) {
            bad_cols.push_back(col);
            continue;
        }
        const double inv = 1.0 / a.at(col, col);
        for (int r = col + 1; r < k; ++r) {
            const double f = a.at(r, col) * inv;
            if (f == 0.0) continue;
            for (int j = col; j < k; ++j) a.at(r, j) -= f * a.at(col, j);
            b[r] -= f * b[col];
        }
    }
    if (!bad_cols.empty()) {
        std::string msg = "rank-deficient regressors; collinear column(s):";
        for (int c : bad_cols) msg += " '" + names[c] + "'";
        raise(ErrorKind::Estimation, msg);
    }

    LstsqResult res;
    res.beta.assign(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < k; ++j) s -= a.at(i, j) * res.beta[j];
        res.beta[i] = s / a.at(i, i);
    }
    for (int r = 0; r < rows; ++r) {
        double e = y[r];
        for (int i = 0; i < k; ++i) e -= x.at(r, i) * res.beta[i];
        res.rss += e * e;
    }
    return res;
}

}  // namespace cbamgrid::linalg

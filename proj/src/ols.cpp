#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <string>

#include "homebias/errors.hpp"
#include "homebias/ols.hpp"

namespace homebias {

namespace {

constexpr double kRcondThreshold = 1e-12;
// Residual sums below this share of the response scale count as an
// exact fit: standard errors are zero and t-statistics undefined.
constexpr double kZeroRssRel = 1e-24;

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X, bool include_intercept) {
    if (!include_intercept) return X;
    Eigen::MatrixXd Xi(X.rows(), X.cols() + 1);
    Xi.col(0) = Eigen::VectorXd::Ones(X.rows());
    Xi.rightCols(X.cols()) = X;
    return Xi;
}

std::vector<std::string> with_const(std::vector<std::string> names, bool include_intercept) {
    if (include_intercept) names.insert(names.begin(), "CONST");
    return names;
}

void check_shape(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int n_params) {
    if (X.rows() != y.size()) {
        throw DomainError("fit_ols: design and response lengths differ");
    }
    if (X.rows() <= n_params) {
        throw InsufficientDataError("fit_ols: need more observations (" +
                                    std::to_string(X.rows()) + ") than parameters (" +
                                    std::to_string(n_params) + ")");
    }
}

Eigen::MatrixXd to_matrix(const DesignMatrix& design) {
    Eigen::MatrixXd X(design.rows.size(), design.column_names.size());
    for (std::size_t i = 0; i < design.rows.size(); ++i) {
        const auto values = design.rows[i].factors.as_array();
        for (std::size_t k = 0; k < values.size(); ++k) {
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = values[k];
        }
    }
    return X;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               std::vector<std::string> names, bool include_intercept) {
    OlsFit fit;
    fit.design = with_intercept(X, include_intercept);
    fit.response = y;
    fit.names = with_const(std::move(names), include_intercept);
    fit.include_intercept = include_intercept;
    fit.n_obs = static_cast<int>(fit.design.rows());
    fit.n_params = static_cast<int>(fit.design.cols());
    check_shape(fit.design, y, fit.n_params);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.design);
    const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
    const double pivot_max = diag.size() > 0 ? diag(0) : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (diag(i) > kRcondThreshold * pivot_max && diag(i) > 0.0) ++rank;
    }
    if (rank < fit.n_params) {
        // pivoting pushes the dependent columns past the numerical rank
        std::vector<std::string> dependent;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index i = rank; i < perm.size(); ++i) {
            dependent.push_back(fit.names[static_cast<std::size_t>(perm(i))]);
        }
        std::sort(dependent.begin(), dependent.end());
        std::string msg = "fit_ols: design is rank deficient; dependent columns:";
        for (const auto& name : dependent) msg += " " + name;
        throw CollinearityError(msg, std::move(dependent));
    }

    fit.coefficients = qr.solve(y);
    fit.fitted = fit.design * fit.coefficients;
    fit.residuals = y - fit.fitted;
    return fit;
}

OlsFit fit_ols(const DesignMatrix& design, bool include_intercept) {
    return fit_ols(to_matrix(design), to_vector(design.response), design.column_names,
                   include_intercept);
}

OlsFit fit_ols_normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                std::vector<std::string> names, bool include_intercept) {
    OlsFit fit;
    fit.design = with_intercept(X, include_intercept);
    fit.response = y;
    fit.names = with_const(std::move(names), include_intercept);
    fit.include_intercept = include_intercept;
    fit.n_obs = static_cast<int>(fit.design.rows());
    fit.n_params = static_cast<int>(fit.design.cols());
    check_shape(fit.design, y, fit.n_params);

    const int n = fit.n_obs;
    const int p = fit.n_params;

    // Plain-loop assembly of the cross products, kept free of Eigen
    // algorithms so this route stays an independent check on fit_ols.
    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < p; ++a) {
            const double xa = fit.design(i, a);
            xty[a] += xa * y(i);
            for (int b = a; b < p; ++b) {
                xtx[a][b] += xa * fit.design(i, b);
            }
        }
    }
    for (int a = 0; a < p; ++a) {
        for (int b = 0; b < a; ++b) xtx[a][b] = xtx[b][a];
    }

    // Gaussian elimination with partial pivoting on [XtX | Xty].
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    for (int col = 0; col < p; ++col) {
        int pivot = col;
        for (int r = col + 1; r < p; ++r) {
            if (std::abs(xtx[r][col]) > std::abs(xtx[pivot][col])) pivot = r;
        }
        if (xtx[pivot][col] == 0.0) {
            throw DomainError("fit_ols_normal_equations: singular cross-product matrix");
        }
        std::swap(xtx[col], xtx[pivot]);
        std::swap(xty[col], xty[pivot]);
        for (int r = col + 1; r < p; ++r) {
            const double factor = xtx[r][col] / xtx[col][col];
            for (int c = col; c < p; ++c) xtx[r][c] -= factor * xtx[col][c];
            xty[r] -= factor * xty[col];
        }
    }
    std::vector<double> beta(p, 0.0);
    for (int r = p - 1; r >= 0; --r) {
        double sum = xty[r];
        for (int c = r + 1; c < p; ++c) sum -= xtx[r][c] * beta[c];
        beta[r] = sum / xtx[r][r];
    }

    fit.coefficients = Eigen::Map<const Eigen::VectorXd>(beta.data(), p);
    fit.fitted.resize(n);
    for (int i = 0; i < n; ++i) {
        double v = 0.0;
        for (int a = 0; a < p; ++a) v += fit.design(i, a) * beta[a];
        fit.fitted(i) = v;
    }
    fit.residuals = y - fit.fitted;
    return fit;
}

OlsFit fit_ols_normal_equations(const DesignMatrix& design, bool include_intercept) {
    return fit_ols_normal_equations(to_matrix(design), to_vector(design.response),
                                    design.column_names, include_intercept);
}

RegressionReport inference(const OlsFit& fit, bool robust) {
    const int n = fit.n_obs;
    const int p = fit.n_params;
    if (n <= p) {
        throw InsufficientDataError("inference: no residual degrees of freedom");
    }

    const double rss = fit.residuals.squaredNorm();
    double tss;
    if (fit.include_intercept) {
        const Eigen::VectorXd centered =
            fit.response.array() - fit.response.mean();
        tss = centered.squaredNorm();
    } else {
        tss = fit.response.squaredNorm();
    }

    const double y_scale = std::max(fit.response.squaredNorm(), 1.0);
    const bool exact_fit = rss <= kZeroRssRel * y_scale;
    const double sigma2 = exact_fit ? 0.0 : rss / static_cast<double>(n - p);

    // (XtX)^-1 from the R factor of the pivoted QR: X P = Q R gives
    // (XtX)^-1 = P R^-1 R^-T P^T.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(fit.design);
    const Eigen::MatrixXd R =
        qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    const Eigen::MatrixXd perm = qr.colsPermutation();
    const Eigen::MatrixXd xtx_inv = perm * (r_inv * r_inv.transpose()) * perm.transpose();

    Eigen::VectorXd se_sq(p);
    if (robust) {
        // HC1: (XtX)^-1 X' diag(e^2) X (XtX)^-1 scaled by n/(n-p)
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd xi = fit.design.row(i).transpose();
            meat.noalias() += fit.residuals(i) * fit.residuals(i) * xi * xi.transpose();
        }
        const Eigen::MatrixXd cov = xtx_inv * meat * xtx_inv *
                                    (static_cast<double>(n) / static_cast<double>(n - p));
        se_sq = cov.diagonal();
    } else {
        se_sq = sigma2 * xtx_inv.diagonal();
    }

    RegressionReport report;
    report.n_obs = n;
    report.n_params = p;
    report.robust_se = robust;
    if (tss <= kZeroRssRel * y_scale) {
        report.r_squared = exact_fit ? 1.0 : 0.0;
    } else {
        report.r_squared = 1.0 - rss / tss;
    }

    const boost::math::students_t dist(static_cast<double>(n - p));
    // report rows keep the published ordering: regressors first, CONST last
    std::vector<int> indices;
    for (int k = fit.include_intercept ? 1 : 0; k < p; ++k) indices.push_back(k);
    if (fit.include_intercept) indices.push_back(0);

    for (int k : indices) {
        CoefficientRow row;
        row.name = fit.names[static_cast<std::size_t>(k)];
        row.coefficient = fit.coefficients(k);
        row.std_error = exact_fit && !robust ? 0.0 : std::sqrt(std::max(se_sq(k), 0.0));
        if (row.std_error > 0.0) {
            row.t_stat = row.coefficient / row.std_error;
            row.p_value =
                2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(*row.t_stat)));
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

RegressionReport estimate_model(const Panel& panel, const std::vector<int>& years,
                                Subsample subsample, const FactorConfig& config) {
    DesignMatrix design = build_design_matrix(panel, years, subsample, config);
    OlsFit fit = fit_ols(design, /*include_intercept=*/true);
    RegressionReport report = inference(fit, config.robust_se);
    report.subsample = subsample;
    report.config = config;
    report.exclusions = design.exclusions;

    std::vector<int> sorted_years = years;
    std::sort(sorted_years.begin(), sorted_years.end());
    if (sorted_years.size() == 1) {
        report.label = std::to_string(sorted_years.front());
    } else {
        report.label = std::to_string(sorted_years.front()) + "-" +
                       std::to_string(sorted_years.back()) + " pooled";
    }
    return report;
}

}  // namespace homebias

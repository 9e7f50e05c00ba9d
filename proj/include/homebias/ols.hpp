#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "homebias/factors.hpp"

namespace homebias {

/// A fitted least-squares model. Coefficients are aligned with
/// `names`: the intercept (CONST) comes first when included, followed
/// by the design columns in their fixed order.
struct OlsFit {
    Eigen::MatrixXd design;    // includes the intercept column when requested
    Eigen::VectorXd response;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    std::vector<std::string> names;
    int n_obs = 0;
    int n_params = 0;
    bool include_intercept = false;
};

/// Minimizes the residual sum of squares via a column-pivoted
/// Householder QR solve; never inverts XtX. Throws CollinearityError
/// (naming the dependent columns) when the design is rank deficient
/// below reciprocal condition 1e-12, and InsufficientDataError when
/// n_obs <= n_params.
OlsFit fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
               std::vector<std::string> names, bool include_intercept);
OlsFit fit_ols(const DesignMatrix& design, bool include_intercept);

/// Independent verification oracle: assembles XtX and Xty with plain
/// loops and solves the normal equations by Gaussian elimination with
/// partial pivoting. No shared code with fit_ols.
OlsFit fit_ols_normal_equations(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                std::vector<std::string> names, bool include_intercept);
OlsFit fit_ols_normal_equations(const DesignMatrix& design, bool include_intercept);

struct CoefficientRow {
    std::string name;
    double coefficient = 0.0;
    double std_error = 0.0;
    std::optional<double> t_stat;   // absent when residual variance is zero
    std::optional<double> p_value;
};

/// Coefficient table in the shape of the published regression tables:
/// regressor rows in design order, intercept row labeled CONST last,
/// R-squared and observation count in the footer.
struct RegressionReport {
    Subsample subsample = Subsample::All;
    std::string label;  // "2012" or "2008-2013 pooled"
    std::vector<CoefficientRow> rows;
    double r_squared = 0.0;
    int n_obs = 0;
    int n_params = 0;
    bool robust_se = false;
    FactorConfig config;
    std::vector<Exclusion> exclusions;
};

/// Classical homoskedastic standard errors se_k = sqrt(s^2 [(XtX)^-1]_kk)
/// with s^2 = RSS/(n-p); t_k = beta_k / se_k; R^2 = 1 - RSS/TSS with TSS
/// centered when an intercept is present. Zero residual variance yields
/// zero standard errors with t and p flagged undefined rather than
/// infinite. `robust` switches to HC1 heteroskedasticity-consistent
/// standard errors.
RegressionReport inference(const OlsFit& fit, bool robust = false);

/// Builds the design matrix for the subsample, fits with intercept
/// (every published results table reports CONST) and returns the
/// labeled report. Errors from design construction and fitting
/// propagate.
RegressionReport estimate_model(const Panel& panel, const std::vector<int>& years,
                                Subsample subsample, const FactorConfig& config);

}  // namespace homebias

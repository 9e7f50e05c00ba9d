#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "homebias/errors.hpp"
#include "homebias/ols.hpp"
#include "support/oracle.hpp"
#include "support/panel_builder.hpp"
#include "support/random.hpp"

using namespace homebias;

namespace {

Eigen::VectorXd column(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

const CoefficientRow& row_named(const RegressionReport& report, const std::string& name) {
    const auto it = std::find_if(report.rows.begin(), report.rows.end(),
                                 [&](const CoefficientRow& r) { return r.name == name; });
    REQUIRE(it != report.rows.end());
    return *it;
}

}  // namespace

TEST_CASE("simple regression has the textbook closed form") {
    // x = 0,1,2 and y = 1,3,4: slope 3/2, intercept 7/6
    Eigen::MatrixXd X(3, 1);
    X << 0.0, 1.0, 2.0;
    const Eigen::VectorXd y = column({1.0, 3.0, 4.0});
    const OlsFit fit = fit_ols(X, y, {"X"}, true);
    REQUIRE(fit.coefficients.size() == 2);
    CHECK(fit.coefficients(0) == doctest::Approx(7.0 / 6.0).epsilon(1e-14));
    CHECK(fit.coefficients(1) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(fit.names == std::vector<std::string>{"CONST", "X"});
    CHECK(fit.n_obs == 3);
    CHECK(fit.n_params == 2);
    CHECK((fit.response - fit.fitted - fit.residuals).norm() == doctest::Approx(0.0));
}

TEST_CASE("exact linear data is reproduced to machine precision") {
    Eigen::MatrixXd X(5, 2);
    X << 1, 2, 2, 1, 3, 5, 4, 3, 5, 8;
    Eigen::VectorXd y(5);
    for (int i = 0; i < 5; ++i) y(i) = 3.0 + 2.0 * X(i, 0) - 0.5 * X(i, 1);
    const OlsFit fit = fit_ols(X, y, {"A", "B"}, true);
    CHECK(fit.coefficients(0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.coefficients(1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fit.coefficients(2) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.residuals.norm() < 1e-12);
}

TEST_CASE("QR and normal-equation routes agree on conditioned designs") {
    testsupport::Rng rng(606);
    const double kappas[] = {1.0, 10.0, 1e3};
    for (int trial = 0; trial < 50; ++trial) {
        const int n = rng.uniform_int(20, 120);
        const int p = rng.uniform_int(2, 8);
        const double kappa = kappas[trial % 3];
        const Eigen::MatrixXd X = testsupport::conditioned_matrix(n, p, kappa, rng);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y(i) = rng.normal();

        std::vector<std::string> names;
        for (int k = 0; k < p; ++k) names.push_back("X" + std::to_string(k));
        const OlsFit qr = fit_ols(X, y, names, true);
        const OlsFit ne = fit_ols_normal_equations(X, y, names, true);

        CAPTURE(trial);
        CAPTURE(kappa);
        const double scale = std::max(1.0, qr.coefficients.norm());
        CHECK((qr.coefficients - ne.coefficients).norm() / scale < 1e-8);

        // first-order optimality on both routes
        const double gate = 1e-8 * qr.design.norm() * std::max(1.0, y.norm());
        CHECK((qr.design.transpose() * qr.residuals).norm() < gate);
        CHECK((ne.design.transpose() * ne.residuals).norm() < gate);
    }
}

TEST_CASE("a duplicated column raises CollinearityError naming it") {
    Eigen::MatrixXd X(6, 3);
    testsupport::Rng rng(707);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = rng.normal();
        X(i, 2) = 2.0 * X(i, 0);  // exact linear dependence
    }
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) y(i) = rng.normal();
    try {
        fit_ols(X, y, {"VOL", "COV", "SIZE"}, false);
        FAIL("expected CollinearityError");
    } catch (const CollinearityError& e) {
        REQUIRE(e.dependent_columns.size() == 1);
        const std::string& col = e.dependent_columns[0];
        CHECK((col == "VOL" || col == "SIZE"));
        CHECK(std::string(e.what()).find("dependent columns:") != std::string::npos);
        CHECK(std::string(e.what()).find(col) != std::string::npos);
    }
}

TEST_CASE("too few observations is an error before any algebra") {
    Eigen::MatrixXd X(3, 3);
    X.setRandom();
    const Eigen::VectorXd y = column({1.0, 2.0, 3.0});
    CHECK_THROWS_AS(fit_ols(X, y, {"A", "B", "C"}, false), InsufficientDataError);
    // intercept adds a parameter: 4 rows, 3 columns + CONST is still too few
    Eigen::MatrixXd X4(4, 3);
    X4.setRandom();
    CHECK_THROWS_AS(fit_ols(X4, column({1.0, 2.0, 3.0, 4.0}), {"A", "B", "C"}, true),
                    InsufficientDataError);
    CHECK_THROWS_AS(fit_ols(X4, column({1.0, 2.0, 3.0}), {"A", "B", "C"}, false), DomainError);
}

TEST_CASE("classical standard errors match a direct inverse computation") {
    testsupport::Rng rng(808);
    const int n = 40;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = rng.uniform(-2.0, 2.0);
        X(i, 1) = rng.uniform(0.0, 5.0);
        y(i) = 1.0 + 0.7 * X(i, 0) - 0.3 * X(i, 1) + 0.4 * rng.normal();
    }
    const OlsFit fit = fit_ols(X, y, {"A", "B"}, true);
    const RegressionReport report = inference(fit);

    // independent route: explicit inverse of the cross-product matrix
    Eigen::MatrixXd Xi(n, 3);
    Xi.col(0).setOnes();
    Xi.rightCols(2) = X;
    const Eigen::MatrixXd xtx_inv = (Xi.transpose() * Xi).inverse();
    const Eigen::VectorXd beta = xtx_inv * Xi.transpose() * y;
    const double rss = (y - Xi * beta).squaredNorm();
    const double s2 = rss / static_cast<double>(n - 3);

    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].name == "A");
    CHECK(report.rows[1].name == "B");
    CHECK(report.rows[2].name == "CONST");  // intercept printed last
    const int source_index[] = {1, 2, 0};   // position of each row in beta
    for (int r = 0; r < 3; ++r) {
        const int k = source_index[r];
        CHECK(report.rows[r].coefficient == doctest::Approx(beta(k)).epsilon(1e-10));
        CHECK(report.rows[r].std_error ==
              doctest::Approx(std::sqrt(s2 * xtx_inv(k, k))).epsilon(1e-10));
        REQUIRE(report.rows[r].t_stat.has_value());
        CHECK(*report.rows[r].t_stat ==
              doctest::Approx(beta(k) / std::sqrt(s2 * xtx_inv(k, k))).epsilon(1e-10));
    }
    CHECK(report.n_obs == n);
    CHECK(report.n_params == 3);

    const double r2 = 1.0 - rss / (y.array() - y.mean()).matrix().squaredNorm();
    CHECK(report.r_squared == doctest::Approx(r2).epsilon(1e-12));
    CHECK(report.r_squared > 0.0);
    CHECK(report.r_squared < 1.0);
}

TEST_CASE("p-values match the closed-form t distribution at 1 and 2 dof") {
    // nu = 1 (Cauchy): p = 1 - (2/pi) atan|t|; nu = 2: p = 1 - |t|/sqrt(2+t^2)
    testsupport::Rng rng(909);
    auto check_df = [&](int n, auto expected_p) {
        Eigen::MatrixXd X(n, 1);
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X(i, 0) = static_cast<double>(i);
            y(i) = 0.5 * i + rng.normal();
        }
        const RegressionReport report = inference(fit_ols(X, y, {"X"}, true));
        for (const auto& row : report.rows) {
            REQUIRE(row.t_stat.has_value());
            REQUIRE(row.p_value.has_value());
            CHECK(*row.p_value == doctest::Approx(expected_p(*row.t_stat)).epsilon(1e-12));
            CHECK(*row.p_value >= 0.0);
            CHECK(*row.p_value <= 1.0);
        }
    };
    check_df(3, [](double t) { return 1.0 - 2.0 / 3.14159265358979323846 * std::atan(std::abs(t)); });
    check_df(4, [](double t) { return 1.0 - std::abs(t) / std::sqrt(2.0 + t * t); });
}

TEST_CASE("an exact fit reports zero SEs and undefined t") {
    Eigen::MatrixXd X(6, 1);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) {
        X(i, 0) = 1.0 + i;
        y(i) = 4.0 - 3.0 * X(i, 0);
    }
    const RegressionReport report = inference(fit_ols(X, y, {"X"}, true));
    CHECK(report.r_squared == doctest::Approx(1.0));
    for (const auto& row : report.rows) {
        CHECK(row.std_error == 0.0);
        CHECK(!row.t_stat.has_value());
        CHECK(!row.p_value.has_value());
    }
}

TEST_CASE("scaling the response scales coefficients, not t or R2") {
    testsupport::Rng rng(1010);
    const int n = 30;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = rng.normal();
        y(i) = 0.3 + X(i, 0) - 2.0 * X(i, 1) + 0.5 * rng.normal();
    }
    const RegressionReport base = inference(fit_ols(X, y, {"A", "B"}, true));
    for (double c : {1e-3, 1e3}) {
        const RegressionReport scaled = inference(fit_ols(X, (c * y).eval(), {"A", "B"}, true));
        for (std::size_t r = 0; r < base.rows.size(); ++r) {
            CHECK(scaled.rows[r].coefficient ==
                  doctest::Approx(c * base.rows[r].coefficient).epsilon(1e-10));
            CHECK(*scaled.rows[r].t_stat == doctest::Approx(*base.rows[r].t_stat).epsilon(1e-10));
        }
        CHECK(scaled.r_squared == doctest::Approx(base.r_squared).epsilon(1e-12));
    }

    // scaling one regressor rescales only its own coefficient
    Eigen::MatrixXd X2 = X;
    X2.col(0) *= 100.0;
    const RegressionReport rescaled = inference(fit_ols(X2, y, {"A", "B"}, true));
    CHECK(row_named(rescaled, "A").coefficient ==
          doctest::Approx(row_named(base, "A").coefficient / 100.0).epsilon(1e-10));
    CHECK(row_named(rescaled, "B").coefficient ==
          doctest::Approx(row_named(base, "B").coefficient).epsilon(1e-10));
    CHECK(rescaled.r_squared == doctest::Approx(base.r_squared).epsilon(1e-12));

    // shifting the response moves only the intercept
    const RegressionReport shifted =
        inference(fit_ols(X, (y.array() + 7.0).matrix().eval(), {"A", "B"}, true));
    CHECK(row_named(shifted, "CONST").coefficient ==
          doctest::Approx(row_named(base, "CONST").coefficient + 7.0).epsilon(1e-10));
    CHECK(row_named(shifted, "A").coefficient ==
          doctest::Approx(row_named(base, "A").coefficient).epsilon(1e-10));
    CHECK(row_named(shifted, "B").coefficient ==
          doctest::Approx(row_named(base, "B").coefficient).epsilon(1e-10));
}

TEST_CASE("HC1 robust errors match the sandwich formula") {
    testsupport::Rng rng(1111);
    const int n = 60;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = rng.uniform(0.5, 4.0);
        // error variance grows with x: classical and robust SEs must differ
        y(i) = 2.0 + 1.5 * X(i, 0) + X(i, 0) * rng.normal();
    }
    const OlsFit fit = fit_ols(X, y, {"X"}, true);
    const RegressionReport classical = inference(fit, false);
    const RegressionReport robust = inference(fit, true);

    Eigen::MatrixXd Xi(n, 2);
    Xi.col(0).setOnes();
    Xi.col(1) = X.col(0);
    const Eigen::MatrixXd bread = (Xi.transpose() * Xi).inverse();
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        meat += fit.residuals(i) * fit.residuals(i) * Xi.row(i).transpose() * Xi.row(i);
    }
    const Eigen::MatrixXd cov =
        bread * meat * bread * (static_cast<double>(n) / static_cast<double>(n - 2));

    CHECK(robust.robust_se);
    CHECK(!classical.robust_se);
    CHECK(row_named(robust, "X").std_error == doctest::Approx(std::sqrt(cov(1, 1))).epsilon(1e-10));
    CHECK(row_named(robust, "CONST").std_error ==
          doctest::Approx(std::sqrt(cov(0, 0))).epsilon(1e-10));
    CHECK(row_named(robust, "X").coefficient ==
          doctest::Approx(row_named(classical, "X").coefficient).epsilon(1e-14));
    CHECK(std::abs(row_named(robust, "X").std_error - row_named(classical, "X").std_error) >
          1e-4);
}

TEST_CASE("pure noise has near-zero R squared") {
    testsupport::Rng rng(1212);
    const int n = 5000;
    Eigen::MatrixXd X(n, 4);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < 4; ++k) X(i, k) = rng.normal();
        y(i) = rng.normal();
    }
    const RegressionReport report =
        inference(fit_ols(X, y, {"A", "B", "C", "D"}, true));
    CHECK(report.r_squared < 0.01);
    CHECK(report.r_squared >= 0.0);
}

TEST_CASE("estimate_model recovers a planted noiseless model") {
    using testsupport::PlantSpec;
    Panel panel = testsupport::make_factor_panel({});
    const FactorConfig config;
    PlantSpec plant;
    plant.beta = {1.8, 40.0, -0.9, 0.04, -0.05, 0.03, 0.6, -0.25, 0.5};
    plant.intercept = 0.15;
    testsupport::plant_response(panel, plant, config);

    const RegressionReport report =
        estimate_model(panel, panel.years(), Subsample::All, config);
    CHECK(report.label == "2005-2013 pooled");
    CHECK(report.n_obs == 171);
    CHECK(report.n_params == 10);
    CHECK(report.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(report.rows.size() == 10);
    for (int k = 0; k < 9; ++k) {
        CHECK(report.rows[k].name == kFactorNames[k]);
        CHECK(std::abs(report.rows[k].coefficient - plant.beta[k]) <
              1e-8 * std::max(1.0, std::abs(plant.beta[k])));
    }
    CHECK(report.rows[9].name == "CONST");
    CHECK(report.rows[9].coefficient == doctest::Approx(plant.intercept).epsilon(1e-8));

    const RegressionReport single = estimate_model(panel, {2012}, Subsample::All, config);
    CHECK(single.label == "2012");
    CHECK(single.n_obs == 19);
}

TEST_CASE("estimate_model recovers a noisy model within three SEs") {
    using testsupport::PlantSpec;
    Panel panel = testsupport::make_factor_panel({});
    const FactorConfig config;
    PlantSpec plant;
    plant.beta = {2.0, 30.0, -1.2, 0.05, -0.04, 0.02, 0.5, -0.3, 0.4};
    plant.intercept = 0.2;
    plant.noise_sd = 0.02;
    testsupport::Rng rng(1313);
    testsupport::plant_response(panel, plant, config, &rng);

    const RegressionReport report =
        estimate_model(panel, panel.years(), Subsample::All, config);
    CHECK(report.r_squared > 0.5);
    for (int k = 0; k < 9; ++k) {
        REQUIRE(report.rows[k].t_stat.has_value());
        CAPTURE(report.rows[k].name);
        CHECK(std::abs(report.rows[k].coefficient - plant.beta[k]) <
              3.0 * report.rows[k].std_error + 1e-12);
    }
}

TEST_CASE("fitting a design matrix carries the factor names through") {
    const Panel panel = testsupport::make_factor_panel({});
    const DesignMatrix design =
        build_design_matrix(panel, {2010, 2011}, Subsample::All, FactorConfig{});
    const OlsFit fit = fit_ols(design, true);
    REQUIRE(fit.names.size() == 10);
    CHECK(fit.names[0] == "CONST");
    for (int k = 0; k < 9; ++k) CHECK(fit.names[static_cast<std::size_t>(k + 1)] == kFactorNames[k]);
    const OlsFit oracle = fit_ols_normal_equations(design, true);
    CHECK((fit.coefficients - oracle.coefficients).norm() <
          1e-8 * std::max(1.0, fit.coefficients.norm()));
}

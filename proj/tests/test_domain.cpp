#include <doctest.h>

#include "homebias/errors.hpp"
#include "homebias/types.hpp"

using namespace homebias;

namespace {

HoldingsRecord australia2012() {
    return {"AUS", 2012, 636089.8, 34000.0, 2298.7, 672388.5};
}

Panel minimal_panel() {
    Panel panel;
    panel.origin = "USA";
    panel.classification["USA"] = MarketClass::Developed;
    panel.classification["AUS"] = MarketClass::Developed;
    return panel;
}

int count_findings(const std::vector<Finding>& fs, const std::string& field) {
    int n = 0;
    for (const auto& f : fs) {
        if (f.field == field) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("iso codes are exactly three uppercase letters") {
    CHECK(is_valid_iso("AUS"));
    CHECK(is_valid_iso("USA"));
    CHECK_FALSE(is_valid_iso("aus"));
    CHECK_FALSE(is_valid_iso("AU"));
    CHECK_FALSE(is_valid_iso("AUST"));
    CHECK_FALSE(is_valid_iso("A1S"));
    CHECK_FALSE(is_valid_iso(""));
    CHECK_FALSE(is_valid_iso("AU "));
}

TEST_CASE("year months order chronologically") {
    CHECK(YearMonth{2012, 11} < YearMonth{2012, 12});
    CHECK(YearMonth{2012, 12} < YearMonth{2013, 1});
    CHECK(YearMonth{2012, 5} == YearMonth{2012, 5});
    CHECK_FALSE(YearMonth{2013, 1} < YearMonth{2012, 12});
}

TEST_CASE("valid panel yields no findings") {
    Panel panel = minimal_panel();
    panel.holdings[{"AUS", 2012}] = australia2012();
    CHECK(validate_panel(panel).empty());
}

TEST_CASE("holdings identity violation is a single named finding") {
    Panel panel = minimal_panel();
    // swapped aggregate and domestic: sum no longer matches aggregate
    HoldingsRecord r = australia2012();
    std::swap(r.domestic_assets, r.aggregate_assets);
    panel.holdings[{"AUS", 2012}] = r;

    const auto findings = validate_panel(panel);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].severity == Severity::Error);
    CHECK(findings[0].where == "holdings AUS 2012");
    CHECK(findings[0].rule.find("aggregate_identity") != std::string::npos);
}

TEST_CASE("holdings identity tolerates 1e-9 relative slack") {
    Panel panel = minimal_panel();
    HoldingsRecord r = australia2012();
    r.aggregate_assets += r.aggregate_assets * 5e-10;
    panel.holdings[{"AUS", 2012}] = r;
    CHECK(validate_panel(panel).empty());

    r.aggregate_assets = 672388.5 * (1.0 + 5e-9);
    panel.holdings[{"AUS", 2012}] = r;
    CHECK(validate_panel(panel).size() == 1);
}

TEST_CASE("negative holdings buckets are findings") {
    Panel panel = minimal_panel();
    HoldingsRecord r = australia2012();
    r.foreign_assets = -1.0;
    r.aggregate_assets = r.domestic_assets + r.foreign_assets + r.investment_funds;
    panel.holdings[{"AUS", 2012}] = r;
    const auto findings = validate_panel(panel);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].field == "foreign");
}

TEST_CASE("series must be strictly increasing with valid months") {
    Panel panel = minimal_panel();
    MonthlySeries s;
    s.country = "AUS";
    s.kind = SeriesKind::ExchangeRate;
    s.observations = {{{2012, 1}, 1.0}, {{2012, 1}, 1.1}};  // duplicate month
    panel.series[{"AUS", SeriesKind::ExchangeRate}] = s;
    auto findings = validate_panel(panel);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].rule.find("strictly increasing") != std::string::npos);

    s.observations = {{{2012, 0}, 1.0}, {{2012, 2}, 1.1}};  // month 0
    panel.series[{"AUS", SeriesKind::ExchangeRate}] = s;
    findings = validate_panel(panel);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].field == "year_month");
}

TEST_CASE("exchange rates must be positive, returns may be negative") {
    Panel panel = minimal_panel();
    MonthlySeries fx;
    fx.country = "AUS";
    fx.kind = SeriesKind::ExchangeRate;
    fx.observations = {{{2012, 1}, 1.0}, {{2012, 2}, 0.0}};
    panel.series[{"AUS", SeriesKind::ExchangeRate}] = fx;
    CHECK(count_findings(validate_panel(panel), "value") == 1);

    Panel panel2 = minimal_panel();
    MonthlySeries rt;
    rt.country = "AUS";
    rt.kind = SeriesKind::MarketReturn;
    rt.observations = {{{2012, 1}, -0.12}, {{2012, 2}, 0.03}};
    panel2.series[{"AUS", SeriesKind::MarketReturn}] = rt;
    CHECK(validate_panel(panel2).empty());
}

TEST_CASE("attribute range rules") {
    Panel panel = minimal_panel();
    CountryAttributes a;
    a.country = "AUS";
    a.year = 2012;
    a.tax_rate = 1.5;
    a.distance_km = -3.0;
    a.foreign_listed = 60;
    a.total_listed = 50;
    a.gdp = 0.0;
    panel.attributes[{"AUS", 2012}] = a;
    const auto findings = validate_panel(panel);
    CHECK(count_findings(findings, "tax_rate") == 1);
    CHECK(count_findings(findings, "distance_km") == 1);
    CHECK(count_findings(findings, "foreign_listed") == 1);
    CHECK(count_findings(findings, "gdp") == 1);
}

TEST_CASE("origin needs no distance; missing fields are not findings") {
    Panel panel = minimal_panel();
    CountryAttributes usa;
    usa.country = "USA";
    usa.year = 2012;
    usa.market_cap = 1e7;
    panel.attributes[{"USA", 2012}] = usa;  // no distance, no gdp, no tax
    CHECK(validate_panel(panel).empty());
}

TEST_CASE("bilateral share rules") {
    Panel panel = minimal_panel();
    BilateralShares b;
    b.country = "AUS";
    b.year = 2012;
    b.actual_share = -0.1;
    b.optimal_share = 0.0;
    panel.bilateral[{"AUS", 2012}] = b;
    const auto findings = validate_panel(panel);
    CHECK(count_findings(findings, "actual_share") == 1);
    CHECK(count_findings(findings, "optimal_share") == 1);
}

TEST_CASE("unclassified countries are findings") {
    Panel panel = minimal_panel();
    panel.holdings[{"TUR", 2012}] = {"TUR", 2012, 10.0, 0.0, 0.0, 10.0};
    const auto findings = validate_panel(panel);
    REQUIRE(findings.size() == 1);
    CHECK(findings[0].where == "country TUR");
    CHECK(findings[0].field == "market_class");
}

TEST_CASE("country lookup requires a classification") {
    Panel panel = minimal_panel();
    CHECK(panel.country("AUS").market_class == MarketClass::Developed);
    CHECK(panel.country("AUS").iso_code == "AUS");
    CHECK_THROWS_AS(panel.country("BRA"), DomainError);
}

TEST_CASE("panel years and countries are sorted unions") {
    Panel panel = minimal_panel();
    panel.classification["BRA"] = MarketClass::Emerging;
    panel.holdings[{"BRA", 2013}] = {"BRA", 2013, 5.0, 0.0, 0.0, 5.0};
    panel.bilateral[{"AUS", 2011}] = {"AUS", 2011, 0.01, 0.02};
    CountryAttributes a;
    a.country = "AUS";
    a.year = 2012;
    panel.attributes[{"AUS", 2012}] = a;

    CHECK(panel.years() == std::vector<int>{2011, 2012, 2013});
    CHECK(panel.countries() == std::vector<std::string>{"AUS", "BRA"});
}

TEST_CASE("validation is order independent") {
    Panel forward = minimal_panel();
    Panel backward = minimal_panel();
    HoldingsRecord bad = australia2012();
    bad.aggregate_assets *= 2.0;
    HoldingsRecord good = australia2012();
    good.country = "USA";

    forward.holdings[{"AUS", 2012}] = bad;
    forward.holdings[{"USA", 2012}] = good;
    backward.holdings[{"USA", 2012}] = good;
    backward.holdings[{"AUS", 2012}] = bad;

    const auto a = validate_panel(forward);
    const auto b = validate_panel(backward);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].to_string() == b[i].to_string());
    }
}

TEST_CASE("finding to_string carries severity, record, field and rule") {
    const Finding f{Severity::Error, "holdings AUS 2012", "aggregate", "aggregate_identity"};
    CHECK(f.to_string() == "error: holdings AUS 2012: aggregate: aggregate_identity");
    const Finding w{Severity::Warning, "year 1990", "holdings", "empty"};
    CHECK(w.to_string() == "warning: year 1990: holdings: empty");
}

TEST_CASE("accessor lookups return null for absent keys") {
    Panel panel = minimal_panel();
    panel.holdings[{"AUS", 2012}] = australia2012();
    CHECK(panel.holdings_for("AUS", 2012) != nullptr);
    CHECK(panel.holdings_for("AUS", 2011) == nullptr);
    CHECK(panel.attributes_for("AUS", 2012) == nullptr);
    CHECK(panel.bilateral_for("AUS", 2012) == nullptr);
    CHECK(panel.series_for("AUS", SeriesKind::ExchangeRate) == nullptr);
}
